/**
 * Minimal dependency-free PNG writer (8-bit RGBA, no interlace). The
 * zlib stream uses stored deflate blocks, so no compressor is needed and
 * output bytes are a pure function of the pixel buffer.
 */

const SIGNATURE = [0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a];

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(bytes: Uint8Array): number {
  let crc = 0xffffffff;
  for (let i = 0; i < bytes.length; i++) {
    crc = CRC_TABLE[(crc ^ bytes[i]) & 0xff] ^ (crc >>> 8);
  }
  return (crc ^ 0xffffffff) >>> 0;
}

function adler32(bytes: Uint8Array): number {
  let a = 1;
  let b = 0;
  for (let i = 0; i < bytes.length; i++) {
    a = (a + bytes[i]) % 65521;
    b = (b + a) % 65521;
  }
  return ((b << 16) | a) >>> 0;
}

function u32be(value: number): number[] {
  return [(value >>> 24) & 0xff, (value >>> 16) & 0xff, (value >>> 8) & 0xff, value & 0xff];
}

function chunk(type: string, data: Uint8Array): number[] {
  const typed = new Uint8Array(4 + data.length);
  for (let i = 0; i < 4; i++) typed[i] = type.charCodeAt(i);
  typed.set(data, 4);
  return [...u32be(data.length), ...typed, ...u32be(crc32(typed))];
}

function zlibStored(raw: Uint8Array): Uint8Array {
  const blocks: number[] = [0x78, 0x01];
  for (let offset = 0; offset < raw.length || offset === 0; offset += 65535) {
    const slice = raw.subarray(offset, Math.min(offset + 65535, raw.length));
    const final = offset + 65535 >= raw.length ? 1 : 0;
    blocks.push(final, slice.length & 0xff, slice.length >>> 8,
                (slice.length & 0xff) ^ 0xff, (slice.length >>> 8) ^ 0xff);
    for (let i = 0; i < slice.length; i++) blocks.push(slice[i]);
    if (raw.length === 0) break;
  }
  blocks.push(...u32be(adler32(raw)));
  return new Uint8Array(blocks);
}

export function encodePng(width: number, height: number,
                          rgba: Uint8ClampedArray): Uint8Array {
  if (rgba.length !== width * height * 4) {
    throw new Error("pixel buffer does not match dimensions");
  }
  const ihdr = new Uint8Array([...u32be(width), ...u32be(height), 8, 6, 0, 0, 0]);
  const raw = new Uint8Array(height * (1 + width * 4));
  for (let y = 0; y < height; y++) {
    raw[y * (1 + width * 4)] = 0; // filter: none
    raw.set(rgba.subarray(y * width * 4, (y + 1) * width * 4) as unknown as Uint8Array,
            y * (1 + width * 4) + 1);
  }
  const out = [
    ...SIGNATURE,
    ...chunk("IHDR", ihdr),
    ...chunk("IDAT", zlibStored(raw)),
    ...chunk("IEND", new Uint8Array(0)),
  ];
  return new Uint8Array(out);
}

/** Read back width/height from an encoded PNG (for tests and sanity checks). */
export function pngDimensions(png: Uint8Array): { width: number; height: number } {
  for (let i = 0; i < SIGNATURE.length; i++) {
    if (png[i] !== SIGNATURE[i]) throw new Error("not a PNG");
  }
  const read32 = (at: number) =>
    ((png[at] << 24) | (png[at + 1] << 16) | (png[at + 2] << 8) | png[at + 3]) >>> 0;
  return { width: read32(16), height: read32(20) };
}
