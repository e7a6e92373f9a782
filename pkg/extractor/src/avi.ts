/**
 * Minimal RIFF/AVI reader for MJPEG files: enough to pull out the video
 * stream's frame payloads (each one a complete JPEG) and its timing.
 */

export interface AviVideo {
  width: number
  height: number
  /** frames per second, from the video stream header (rate / scale) */
  fps: number
  /** total frame count declared by the main header */
  totalFrames: number
  microSecPerFrame: number
  /** MJPEG payloads in stream order */
  frames: Buffer[]
}

function fourcc(buf: Buffer, offset: number): string {
  return buf.toString('latin1', offset, offset + 4)
}

interface HeaderFields {
  microSecPerFrame?: number
  totalFrames?: number
  fps?: number
  width?: number
  height?: number
}

function walk(buf: Buffer, start: number, end: number, out: HeaderFields, frames: Buffer[]) {
  let offset = start
  while (offset + 8 <= end) {
    const id = fourcc(buf, offset)
    const size = buf.readUInt32LE(offset + 4)
    const body = offset + 8
    if (body + size > end) {
      throw new Error(`truncated AVI chunk ${id} at ${offset}`)
    }
    if (id === 'LIST' || id === 'RIFF') {
      walk(buf, body + 4, body + size, out, frames)
    } else if (id === 'avih') {
      out.microSecPerFrame = buf.readUInt32LE(body)
      out.totalFrames = buf.readUInt32LE(body + 16)
    } else if (id === 'strh' && fourcc(buf, body) === 'vids') {
      const scale = buf.readUInt32LE(body + 20)
      const rate = buf.readUInt32LE(body + 24)
      if (scale > 0 && rate > 0) out.fps = rate / scale
    } else if (id === 'strf' && out.width === undefined && size >= 12) {
      out.width = buf.readInt32LE(body + 4)
      out.height = Math.abs(buf.readInt32LE(body + 8))
    } else if ((id === '00dc' || id === '00db') && size > 0) {
      frames.push(buf.subarray(body, body + size))
    }
    offset = body + size + (size & 1)
  }
}

export function parseMjpegAvi(buf: Buffer): AviVideo {
  if (buf.length < 12 || fourcc(buf, 0) !== 'RIFF' || fourcc(buf, 8) !== 'AVI ') {
    throw new Error('not an AVI file')
  }
  const riffSize = buf.readUInt32LE(4)
  const end = Math.min(8 + riffSize, buf.length)
  const fields: HeaderFields = {}
  const frames: Buffer[] = []
  walk(buf, 12, end, fields, frames)
  if (frames.length === 0) {
    throw new Error('AVI contains no video frame chunks')
  }
  if (!frames.every(f => f[0] === 0xff && f[1] === 0xd8)) {
    throw new Error('video stream is not MJPEG (expected JPEG frame payloads)')
  }
  const fps =
    fields.fps ?? (fields.microSecPerFrame ? 1e6 / fields.microSecPerFrame : undefined)
  if (!fps || !Number.isFinite(fps) || fps <= 0) {
    throw new Error('AVI headers carry no usable frame rate')
  }
  return {
    width: fields.width ?? 0,
    height: fields.height ?? 0,
    fps,
    totalFrames: fields.totalFrames ?? frames.length,
    microSecPerFrame: fields.microSecPerFrame ?? Math.round(1e6 / fps),
    frames,
  }
}
