#!/usr/bin/env python3
# Copyright 2026 The bcast Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Example adapter: Whisper / WhisperX JSON output -> bcast stage manifest.

    whisper_to_stage.py --media-id b0001 --stage asr b0001.json >> stages/asr.jsonl

Reads the "segments" list ({start, end, text, speaker?}) of each input file.
Segments are sorted by start; empty or inverted spans are skipped; overlaps
are clipped to the previous end.
"""

import argparse
import json
import sys


def convert(doc, media_id, stage):
    segments = sorted(doc.get("segments", []), key=lambda s: float(s["start"]))
    last_end = 0.0
    for s in segments:
        start = max(float(s["start"]), last_end)
        end = float(s["end"])
        if end <= start:
            continue
        rec = {"media_id": media_id, "start_s": round(start, 3), "end_s": round(end, 3),
               "text": s.get("text", ""), "stage": stage}
        if stage == "diarized":
            if "speaker" not in s:
                raise SystemExit(f"{media_id}: diarized segment without speaker at {start}")
            rec["speaker"] = s["speaker"]
        last_end = rec["end_s"]
        yield rec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--media-id", required=True)
    ap.add_argument("--stage", choices=["asr", "aligned", "diarized"], required=True)
    ap.add_argument("inputs", nargs="+")
    args = ap.parse_args()
    for path in args.inputs:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
        for rec in convert(doc, args.media_id, args.stage):
            sys.stdout.write(json.dumps(rec, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
