"""Regenerate the shipped corpus: one JSON file per seed 0..199."""
import sys
from pathlib import Path

from histforcing.generate import corpus_file_name, corpus_specs, generate
from histforcing.serialize import dumps

out = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "corpus")
out.mkdir(exist_ok=True)
for spec in corpus_specs():
    (out / corpus_file_name(spec)).write_text(dumps(generate(spec)), encoding="utf-8")
print(f"wrote {len(corpus_specs())} files to {out}")
