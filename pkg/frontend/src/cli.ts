/** CLI: `render --in <dir> --preset <fig3|fig4|fig5|fig6|table2> --out <dir>`. */

import { PRESETS, renderPreset } from "./figures.js";

function usage(): string {
  return (
    "usage: render --in <dir> --preset <" +
    PRESETS.join("|") +
    "> --out <dir>"
  );
}

export function main(argv: string[]): number {
  if (argv[0] !== "render") {
    console.error(usage());
    return 2;
  }
  const args = new Map<string, string>();
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key?.startsWith("--") || value === undefined) {
      console.error(usage());
      return 2;
    }
    args.set(key.slice(2), value);
  }
  const inDir = args.get("in");
  const outDir = args.get("out");
  const preset = args.get("preset");
  if (!inDir || !outDir || !preset) {
    console.error(usage());
    return 2;
  }
  try {
    for (const file of renderPreset(preset, inDir, outDir)) {
      console.log(file);
    }
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  return 0;
}

if (process.argv[1]?.endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
