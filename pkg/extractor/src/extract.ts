/**
 * Extraction job: decode a video at a fixed candidate rate, embed each
 * sampled frame, and emit the three framesieve inputs:
 *
 *   STEM.digf           binary feature file
 *   STEM.frames/        one <originalIndex>.jpg per sampled frame
 *   STEM.manifest.json  original_index -> image file, plus video metadata
 */

import { mkdirSync, readFileSync, rmSync, writeFileSync } from 'fs'
import { join } from 'path'
import jpeg from 'jpeg-js'

import { parseMjpegAvi } from './avi.js'
import { FrameRecord, writeDigf } from './digf.js'
import { DecodedImage, EmbeddingBackend, HttpEmbeddingBackend, PixelGridBackend } from './embed.js'

export interface ExtractionJob {
  videoPath: string
  outStem: string
  /** candidate sampling rate; frames are taken nearest to k / targetFps */
  targetFps?: number
  /** "pixel-grid", "pixel-grid:<n>", or an http(s) embedding endpoint */
  backend?: string
  jpegQuality?: number
}

export interface ExtractionResult {
  digfPath: string
  framesDir: string
  manifestPath: string
  recordCount: number
  dim: number
  videoFps: number
  durationS: number
}

export function resolveBackend(spec: string, jpegQuality: number): EmbeddingBackend {
  if (spec.startsWith('http://') || spec.startsWith('https://')) {
    return new HttpEmbeddingBackend(spec, image => encodeJpeg(image, jpegQuality))
  }
  if (spec === 'pixel-grid') return new PixelGridBackend()
  const gridMatch = /^pixel-grid:(\d+)$/.exec(spec)
  if (gridMatch) return new PixelGridBackend(Number(gridMatch[1]))
  throw new Error(`unknown backend ${spec}; use pixel-grid[:n] or an endpoint URL`)
}

function encodeJpeg(image: DecodedImage, quality: number): Buffer {
  const encoded = jpeg.encode(
    { width: image.width, height: image.height, data: Buffer.from(image.data) },
    quality,
  )
  return Buffer.from(encoded.data)
}

/** Nearest source frame to each target time k / targetFps; ties go earlier. */
export function sampleFrameIndices(
  totalFrames: number,
  videoFps: number,
  targetFps: number,
): number[] {
  if (totalFrames < 1) throw new Error('video has no frames')
  if (targetFps <= 0) throw new Error('targetFps must be positive')
  const lastTimestamp = (totalFrames - 1) / videoFps
  const picked: number[] = []
  for (let k = 0; ; k++) {
    const target = k / targetFps
    if (target > lastTimestamp) break
    const low = Math.min(Math.floor(target * videoFps), totalFrames - 1)
    const high = Math.min(low + 1, totalFrames - 1)
    const pick =
      Math.abs(low / videoFps - target) <= Math.abs(high / videoFps - target) ? low : high
    if (picked.length === 0 || pick > picked[picked.length - 1]) {
      picked.push(pick)
    }
  }
  return picked
}

export async function extract(job: ExtractionJob): Promise<ExtractionResult> {
  const targetFps = job.targetFps ?? 2.0
  const quality = job.jpegQuality ?? 90
  const backend = resolveBackend(job.backend ?? 'pixel-grid', quality)

  const video = parseMjpegAvi(readFileSync(job.videoPath))
  const totalFrames = video.frames.length
  const indices = sampleFrameIndices(totalFrames, video.fps, targetFps)

  const digfPath = `${job.outStem}.digf`
  const framesDir = `${job.outStem}.frames`
  const manifestPath = `${job.outStem}.manifest.json`
  const cleanup = () => {
    rmSync(digfPath, { force: true })
    rmSync(manifestPath, { force: true })
    rmSync(framesDir, { recursive: true, force: true })
  }

  try {
    mkdirSync(framesDir, { recursive: true })
    const records: FrameRecord[] = []
    const frameFiles: Record<string, string> = {}
    let dim = 0
    for (const index of indices) {
      const decoded = jpeg.decode(video.frames[index], { useTArray: true, maxMemoryUsageInMB: 64 })
      const image: DecodedImage = {
        width: decoded.width,
        height: decoded.height,
        data: decoded.data,
      }
      const vector = await backend.embed(image)
      if (dim === 0) dim = vector.length
      if (vector.length !== dim) {
        throw new Error(`backend changed dim from ${dim} to ${vector.length}`)
      }
      const fileName = `${index}.jpg`
      writeFileSync(join(framesDir, fileName), encodeJpeg(image, quality))
      frameFiles[String(index)] = fileName
      records.push({
        originalIndex: index,
        timestampUs: Math.round((index / video.fps) * 1e6),
        vector,
      })
    }

    writeDigf(digfPath, dim, targetFps, records)
    const manifest = {
      video_path: job.videoPath,
      video_fps: video.fps,
      duration_s: (totalFrames - 1) / video.fps,
      total_frames: totalFrames,
      width: video.width,
      height: video.height,
      target_fps: targetFps,
      backend: backend.name,
      dim,
      count: records.length,
      frames: frameFiles,
    }
    writeFileSync(manifestPath, JSON.stringify(manifest, null, 2) + '\n')
    return {
      digfPath,
      framesDir,
      manifestPath,
      recordCount: records.length,
      dim,
      videoFps: video.fps,
      durationS: manifest.duration_s,
    }
  } catch (error) {
    cleanup()
    throw error
  }
}
