/**
 * Frame embedding backends. Every backend returns an L2-normalized vector
 * so downstream cosine similarity reduces to a dot product.
 */

export interface DecodedImage {
  width: number
  height: number
  /** RGBA bytes, row-major */
  data: Uint8Array
}

export interface EmbeddingBackend {
  readonly name: string
  readonly dim: number
  embed(image: DecodedImage): Promise<Float32Array>
}

export function l2Normalize(vector: Float32Array): Float32Array {
  let sq = 0
  for (const v of vector) sq += v * v
  if (sq === 0) {
    // An all-zero embedding (e.g. a black frame under a pixel backend) would
    // break cosine downstream; map it to a fixed unit vector instead.
    const out = new Float32Array(vector.length)
    out[0] = 1
    return out
  }
  const norm = Math.sqrt(sq)
  const out = new Float32Array(vector.length)
  for (let i = 0; i < vector.length; i++) out[i] = vector[i] / norm
  return out
}

/**
 * Deterministic local backend: mean RGB over a grid of cells, normalized.
 * It is not a learned model, but it separates scenes by color/layout, runs
 * anywhere, and keeps the pipeline reproducible byte-for-byte.
 */
export class PixelGridBackend implements EmbeddingBackend {
  readonly name: string
  readonly dim: number

  constructor(private grid = 4) {
    if (grid < 1 || grid > 64) throw new Error(`grid must be in [1, 64], got ${grid}`)
    this.name = `pixel-grid:${grid}`
    this.dim = grid * grid * 3
  }

  async embed(image: DecodedImage): Promise<Float32Array> {
    const { width, height, data } = image
    if (width < 1 || height < 1 || data.length < width * height * 4) {
      throw new Error('decoded image is empty or malformed')
    }
    const g = this.grid
    const sums = new Float64Array(g * g * 3)
    const counts = new Float64Array(g * g)
    for (let y = 0; y < height; y++) {
      const cy = Math.min(Math.floor((y * g) / height), g - 1)
      for (let x = 0; x < width; x++) {
        const cx = Math.min(Math.floor((x * g) / width), g - 1)
        const cell = cy * g + cx
        const px = (y * width + x) * 4
        sums[cell * 3] += data[px]
        sums[cell * 3 + 1] += data[px + 1]
        sums[cell * 3 + 2] += data[px + 2]
        counts[cell] += 1
      }
    }
    const out = new Float32Array(this.dim)
    for (let cell = 0; cell < g * g; cell++) {
      const n = counts[cell] || 1
      out[cell * 3] = sums[cell * 3] / n / 255
      out[cell * 3 + 1] = sums[cell * 3 + 1] / n / 255
      out[cell * 3 + 2] = sums[cell * 3 + 2] / n / 255
    }
    return l2Normalize(out)
  }
}

/**
 * Remote backend: POST the JPEG (base64) to an embedding endpoint and read
 * back {"embedding": [...]}. Suits DINOv2-class servers.
 */
export class HttpEmbeddingBackend implements EmbeddingBackend {
  readonly name: string
  dim = 0

  constructor(
    private url: string,
    private encodeJpeg: (image: DecodedImage) => Buffer,
    private timeoutMs = 30000,
  ) {
    this.name = url
  }

  async embed(image: DecodedImage): Promise<Float32Array> {
    const jpeg = this.encodeJpeg(image)
    const response = await fetch(this.url, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ image_base64: jpeg.toString('base64') }),
      signal: AbortSignal.timeout(this.timeoutMs),
    })
    if (!response.ok) {
      throw new Error(`embedding endpoint returned HTTP ${response.status}`)
    }
    const payload = (await response.json()) as { embedding?: number[] }
    if (!Array.isArray(payload.embedding) || payload.embedding.length === 0) {
      throw new Error('embedding endpoint response lacks an "embedding" array')
    }
    if (this.dim === 0) this.dim = payload.embedding.length
    if (payload.embedding.length !== this.dim) {
      throw new Error(
        `embedding dim changed from ${this.dim} to ${payload.embedding.length}`,
      )
    }
    return l2Normalize(Float32Array.from(payload.embedding))
  }
}
