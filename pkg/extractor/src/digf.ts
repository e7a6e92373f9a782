/**
 * DIGF binary feature-file writer (and a reader used for verification).
 *
 * Layout, little-endian:
 *   magic "DIGF" | u32 version=1 | u32 dim | u64 count | f64 sourceFps
 *   then count records of { u64 originalIndex, u64 timestampUs, dim x f32 }
 */

import { readFileSync, writeFileSync } from 'fs'

export const DIGF_MAGIC = 'DIGF'
export const DIGF_VERSION = 1
const HEADER_SIZE = 28

export interface FrameRecord {
  originalIndex: number
  timestampUs: number
  vector: Float32Array
}

export interface DigfFile {
  dim: number
  sourceFps: number
  records: FrameRecord[]
}

export function encodeDigf(dim: number, sourceFps: number, records: FrameRecord[]): Buffer {
  const recordSize = 16 + 4 * dim
  const buf = Buffer.alloc(HEADER_SIZE + recordSize * records.length)
  buf.write(DIGF_MAGIC, 0, 'latin1')
  buf.writeUInt32LE(DIGF_VERSION, 4)
  buf.writeUInt32LE(dim, 8)
  buf.writeBigUInt64LE(BigInt(records.length), 12)
  buf.writeDoubleLE(sourceFps, 20)
  let offset = HEADER_SIZE
  let prevIndex = -1
  let prevStamp = -1
  for (const record of records) {
    if (record.vector.length !== dim) {
      throw new Error(`record vector has dim ${record.vector.length}, expected ${dim}`)
    }
    if (record.originalIndex <= prevIndex || record.timestampUs <= prevStamp) {
      throw new Error('records must strictly increase in index and timestamp')
    }
    if (!Array.from(record.vector).some(v => v !== 0)) {
      throw new Error(`record ${record.originalIndex} has an all-zero vector`)
    }
    prevIndex = record.originalIndex
    prevStamp = record.timestampUs
    buf.writeBigUInt64LE(BigInt(record.originalIndex), offset)
    buf.writeBigUInt64LE(BigInt(record.timestampUs), offset + 8)
    for (let i = 0; i < dim; i++) {
      buf.writeFloatLE(record.vector[i], offset + 16 + 4 * i)
    }
    offset += recordSize
  }
  return buf
}

export function writeDigf(
  path: string,
  dim: number,
  sourceFps: number,
  records: FrameRecord[],
): void {
  writeFileSync(path, encodeDigf(dim, sourceFps, records))
}

export function decodeDigf(buf: Buffer): DigfFile {
  if (buf.length < 4 || buf.toString('latin1', 0, 4) !== DIGF_MAGIC) {
    throw new Error('bad DIGF magic')
  }
  if (buf.length < HEADER_SIZE) {
    throw new Error('truncated DIGF header')
  }
  const version = buf.readUInt32LE(4)
  if (version !== DIGF_VERSION) {
    throw new Error(`unsupported DIGF version ${version}`)
  }
  const dim = buf.readUInt32LE(8)
  const count = Number(buf.readBigUInt64LE(12))
  const sourceFps = buf.readDoubleLE(20)
  const recordSize = 16 + 4 * dim
  if (buf.length !== HEADER_SIZE + recordSize * count) {
    throw new Error(`DIGF size mismatch: ${buf.length} bytes for ${count} records`)
  }
  const records: FrameRecord[] = []
  let offset = HEADER_SIZE
  let prevIndex = -1
  let prevStamp = -1
  for (let r = 0; r < count; r++) {
    const originalIndex = Number(buf.readBigUInt64LE(offset))
    const timestampUs = Number(buf.readBigUInt64LE(offset + 8))
    if (originalIndex <= prevIndex || timestampUs <= prevStamp) {
      throw new Error('DIGF records are not strictly increasing')
    }
    prevIndex = originalIndex
    prevStamp = timestampUs
    const vector = new Float32Array(dim)
    for (let i = 0; i < dim; i++) {
      vector[i] = buf.readFloatLE(offset + 16 + 4 * i)
    }
    records.push({ originalIndex, timestampUs, vector })
    offset += recordSize
  }
  return { dim, sourceFps, records }
}

export function readDigf(path: string): DigfFile {
  return decodeDigf(readFileSync(path))
}
