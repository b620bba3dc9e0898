#!/usr/bin/env python3
"""Fetch benchmark distribution files into a local cache.

Downloads the evaluation task data once and stores it under a cache
directory (default: $ALIGNFORGE_BENCH_CACHE or ~/.cache/alignforge/benchmarks):

  arc_challenge/    six JSONL files (ARC Challenge + Easy, train/validation/test)
  truthfulqa_mc2/   mc_task.jsonl with mc1/mc2 targets
  bbq_lite_json/    BIG-bench task.json files for the six bias categories

ARC and TruthfulQA ship as parquet on the Hugging Face hub; they are
converted 1:1 to JSONL here (field-for-field, no reshaping) so the C++
loaders stay dependency-free. Requires pandas + pyarrow for that step.

Set HF_ENDPOINT / ALIGNFORGE_GITHUB_BASE to route downloads through a
mirror.
"""

import argparse
import json
import os
import sys
import urllib.request

HF_BASE = os.environ.get("HF_ENDPOINT", "https://huggingface.co")
GH_BASE = os.environ.get("ALIGNFORGE_GITHUB_BASE", "https://github.com")

ARC_SUBSETS = ["ARC-Challenge", "ARC-Easy"]
ARC_SPLITS = ["train", "validation", "test"]

BBQ_CATEGORIES = [
    "age",
    "gender_identity",
    "nationality",
    "physical_appearance",
    "race_ethnicity",
    "sexual_orientation",
]


def fetch(url: str, dest: str) -> None:
    if os.path.exists(dest) and os.path.getsize(dest) > 0:
        print(f"cached   {dest}")
        return
    print(f"fetching {url}")
    tmp = dest + ".part"
    with urllib.request.urlopen(url, timeout=120) as response, open(tmp, "wb") as out:
        while True:
            chunk = response.read(1 << 16)
            if not chunk:
                break
            out.write(chunk)
    os.replace(tmp, dest)


def to_plain(value):
    """numpy scalars/arrays -> plain Python for JSON serialization."""
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, dict):
        return {k: to_plain(v) for k, v in value.items()}
    return value


def parquet_to_jsonl(parquet_path: str, jsonl_path: str) -> int:
    import pandas as pd

    frame = pd.read_parquet(parquet_path)
    with open(jsonl_path, "w", encoding="utf-8") as out:
        for record in frame.to_dict(orient="records"):
            out.write(json.dumps({k: to_plain(v) for k, v in record.items()},
                                 ensure_ascii=False))
            out.write("\n")
    return len(frame)


def fetch_arc(cache: str) -> None:
    out_dir = os.path.join(cache, "arc_challenge")
    os.makedirs(out_dir, exist_ok=True)
    total = 0
    for subset in ARC_SUBSETS:
        for split in ARC_SPLITS:
            url = (f"{HF_BASE}/datasets/allenai/ai2_arc/resolve/main/"
                   f"{subset}/{split}-00000-of-00001.parquet")
            parquet = os.path.join(out_dir, f"{subset}-{split}.parquet")
            jsonl = os.path.join(out_dir, f"{subset}-{split}.jsonl")
            fetch(url, parquet)
            if not os.path.exists(jsonl):
                count = parquet_to_jsonl(parquet, jsonl)
                print(f"wrote    {jsonl} ({count} records)")
            total += sum(1 for _ in open(jsonl, encoding="utf-8"))
    print(f"arc total records: {total}")


def fetch_truthfulqa(cache: str) -> None:
    out_dir = os.path.join(cache, "truthfulqa_mc2")
    os.makedirs(out_dir, exist_ok=True)
    url = (f"{HF_BASE}/datasets/truthful_qa/resolve/main/"
           f"multiple_choice/validation-00000-of-00001.parquet")
    parquet = os.path.join(out_dir, "mc_task.parquet")
    jsonl = os.path.join(out_dir, "mc_task.jsonl")
    fetch(url, parquet)
    if not os.path.exists(jsonl):
        count = parquet_to_jsonl(parquet, jsonl)
        print(f"wrote    {jsonl} ({count} records)")
    print(f"truthfulqa records: {sum(1 for _ in open(jsonl, encoding='utf-8'))}")


def fetch_bbq(cache: str) -> None:
    out_dir = os.path.join(cache, "bbq_lite_json")
    os.makedirs(out_dir, exist_ok=True)
    for category in BBQ_CATEGORIES:
        for condition in ("ambig", "disambig"):
            name = f"{category}_{condition}"
            url = (f"{GH_BASE}/google/BIG-bench/raw/main/bigbench/"
                   f"benchmark_tasks/bbq_lite_json/{name}/task.json")
            fetch(url, os.path.join(out_dir, f"{name}.json"))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    default_cache = os.environ.get(
        "ALIGNFORGE_BENCH_CACHE",
        os.path.join(os.path.expanduser("~"), ".cache", "alignforge", "benchmarks"))
    parser.add_argument("--out", default=default_cache, help="cache directory")
    parser.add_argument("--tasks", default="arc,truthfulqa,bbq",
                        help="comma-separated subset of arc,truthfulqa,bbq")
    args = parser.parse_args()

    os.makedirs(args.out, exist_ok=True)
    tasks = {t.strip() for t in args.tasks.split(",") if t.strip()}
    try:
        if "arc" in tasks:
            fetch_arc(args.out)
        if "truthfulqa" in tasks:
            fetch_truthfulqa(args.out)
        if "bbq" in tasks:
            fetch_bbq(args.out)
    except Exception as error:  # noqa: BLE001 - surface everything to the caller
        print(f"fetch failed: {error}", file=sys.stderr)
        return 1
    print(f"cache ready: {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
