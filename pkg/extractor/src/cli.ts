#!/usr/bin/env node
/**
 * framesieve-extract: video file in, framesieve inputs out.
 *
 *   framesieve-extract --video clip.avi --out work/clip [--fps 2]
 *                      [--backend pixel-grid|pixel-grid:<n>|URL] [--quality 90]
 */

import { extract } from './extract.js'

function parseArgs(argv: string[]): Record<string, string> {
  const out: Record<string, string> = {}
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i]
    if (!arg.startsWith('--')) throw new Error(`unexpected argument ${arg}`)
    const key = arg.slice(2)
    const value = argv[i + 1]
    if (value === undefined || value.startsWith('--')) {
      throw new Error(`flag --${key} needs a value`)
    }
    out[key] = value
    i++
  }
  return out
}

async function main() {
  const args = parseArgs(process.argv.slice(2))
  const video = args['video']
  const stem = args['out']
  if (!video || !stem) {
    console.error(
      'usage: framesieve-extract --video FILE --out STEM [--fps 2] ' +
        '[--backend pixel-grid|pixel-grid:N|URL] [--quality 90]',
    )
    process.exit(2)
  }
  const result = await extract({
    videoPath: video,
    outStem: stem,
    targetFps: args['fps'] ? Number(args['fps']) : undefined,
    backend: args['backend'],
    jpegQuality: args['quality'] ? Number(args['quality']) : undefined,
  })
  console.log(JSON.stringify(result, null, 2))
}

main().catch(error => {
  console.error(`error: ${error instanceof Error ? error.message : error}`)
  process.exit(1)
})
