import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { DocumentFile } from "../src/document.js";

const here = dirname(fileURLToPath(import.meta.url));

export function loadFixture(name: string): DocumentFile {
  const raw = readFileSync(join(here, "fixtures", name), "utf-8");
  return JSON.parse(raw) as DocumentFile;
}
