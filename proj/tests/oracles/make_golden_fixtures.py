#!/usr/bin/env python3
# Copyright 2026 The sereval Authors. All Rights Reserved.
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
# ==============================================================================
"""Authors the 12-utterance golden dataset and its mock model responses.

Every raw response is written from an explicit intent (label or
distribution); the intent table is saved next to the fixtures so the
scoreboard oracle never has to parse model text.
"""

import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "golden"
LABELS = ["Angry", "Happy", "Neutral", "Sad"]
VARIANTS = ["Direct", "T", "A", "TA", "TAR"]
ALIAS = {"Angry": "anger", "Happy": "happiness", "Neutral": "neutrality", "Sad": "sadness"}

# utt_id, speaker, annotator votes
UTTS = [
    ("u01", "s1", {"angry": 4, "neutral": 1}),
    ("u02", "s1", {"angry": 3, "sad": 2}),
    ("u03", "s2", {"angry": 5}),
    ("u04", "s2", {"happy": 4, "neutral": 1}),
    ("u05", "s3", {"happy": 3, "neutral": 1, "angry": 1}),
    ("u06", "s3", {"happy": 2, "neutral": 2, "sad": 1}),  # tied: no agreement
    ("u07", "s1", {"neutral": 5}),
    ("u08", "s2", {"neutral": 3, "sad": 2}),
    ("u09", "s3", {"neutral": 4, "happy": 1}),
    ("u10", "s1", {"sad": 4, "neutral": 1}),
    ("u11", "s2", {"sad": 3, "angry": 1, "neutral": 1}),
    ("u12", "s3", {"sad": 2, "neutral": 1, "angry": 1, "happy": 1}),
]

# Intended hard answers per variant; X = no usable label, E = transport error.
HARD = {
    "u01": "A A A A A", "u02": "S A A A S", "u03": "A A N A A", "u04": "H H H H H",
    "u05": "N H H H E", "u06": "H N H H N", "u07": "N N N N N", "u08": "N S N S N",
    "u09": "X N H N N", "u10": "S S S S S", "u11": "A S X S S", "u12": "N S S N S",
}
CODE = {"A": "Angry", "H": "Happy", "N": "Neutral", "S": "Sad"}

MAIN = [0.4, 0.5, 0.6, 0.7, 0.85]
REST = [["0.2", "0.2", "0.2"], ["0.2", "0.2", "0.1"], ["0.2", "0.1", "0.1"], ["0.1", "0.1", "0.1"],
        ["0.05", "0.05", "0.05"]]
MAIN_TXT = ["0.4", "0.5", "0.6", "0.7", "0.85"]


def hard_text(label, style, other):
    low = label.lower()
    if style == 0:
        return f"FINAL_LABEL: {label}"
    if style == 1:
        return f"ASR_TRANSCRIPT: I told you already.\nFINAL_LABEL: {low}"
    if style == 2:
        return f"ACOUSTIC_CAPTION: steady pitch, moderate energy.\nFINAL_LABEL: {ALIAS[label]}"
    if style == 3:
        return f"Listening to the clip, the speaker sounds {low} overall."
    if style == 4:
        return (f"REASONING: At first the pitch hints at FINAL_LABEL: {other} but the later words matter more.\n"
                f"FINAL_LABEL: {label}")
    return f"**FINAL_LABEL:** {label}"


INVALID_TEXT = ["I am unable to determine the emotion in this recording.",
                "It could be angry or it could be sad; hard to tell."]


def dist_values(label, k):
    """Decimal strings in label order: MAIN[k] on `label`, REST[k] elsewhere."""
    rest = list(REST[k])
    out = []
    for lab in LABELS:
        out.append(MAIN_TXT[k] if lab == label else rest.pop(0))
    return out


def dist_text(label, k, style):
    vals = dist_values(label, k)
    if style == 0:
        body = ", ".join(f'"{lab}": {v}' for lab, v in zip(LABELS, vals))
        text = f"EMOTION_DISTRIBUTION: {{{body}}}\nFINAL_LABEL: {label}"
        return text, vals
    if style == 1:
        pct = [str(round(float(v) * 100)) for v in vals]
        body = ", ".join(f'"{lab.lower()}": {p}' for lab, p in zip(LABELS, pct))
        return f"EMOTION_DISTRIBUTION: {{{body}}}\nFINAL_LABEL: {label}", pct
    if style == 2:
        body = ", ".join(f"'{lab}': {v}" for lab, v in zip(LABELS, vals))
        return f"Here is my estimate.\nEMOTION_DISTRIBUTION: {{{body},}}\nFINAL_LABEL: {label}", vals
    body = ", ".join(f'"{ALIAS[lab]}": {v}' for lab, v in zip(LABELS, vals))
    return f"EMOTION_DISTRIBUTION:\n```json\n{{{body}}}\n```\nFINAL_LABEL: {label}", vals


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    descriptor = {
        "schema_version": 1,
        "dataset_id": "golden12",
        "languages": ["en"],
        "audio_source": "scripted",
        "audio_source_name": "synthetic",
        "label_source": "perceived",
        "label_set": LABELS,
        "speakers": ["s1", "s2", "s3"],
        "utterances": "golden12.records.jsonl",
    }
    (OUT / "golden12.json").write_text(json.dumps(descriptor, indent=2) + "\n")
    with open(OUT / "golden12.records.jsonl", "w") as f:
        for utt, spk, votes in UTTS:
            f.write(json.dumps({"utt_id": utt, "audio_ref": f"audio/{utt}.wav", "speaker_id": spk,
                                "votes": votes, "transcript": "synthetic line"}) + "\n")

    fixtures, intent = [], {"labels": [l.lower() for l in LABELS], "hard": {}, "distribution": {}}
    n = 0
    for ui, (utt, _, _) in enumerate(UTTS):
        for vi, variant in enumerate(VARIANTS):
            code = HARD[utt].split()[vi]
            key = f"{utt}/{variant}"
            if code == "E":
                fixtures.append({"utt_id": utt, "variant": variant, "mode": "hard", "error": "transport"})
                intent["hard"][key] = None
            elif code == "X":
                fixtures.append({"utt_id": utt, "variant": variant, "mode": "hard",
                                 "raw_text": INVALID_TEXT[n % 2]})
                intent["hard"][key] = None
            else:
                label = CODE[code]
                other = LABELS[(LABELS.index(label) + 1) % 4]
                fixtures.append({"utt_id": utt, "variant": variant, "mode": "hard",
                                 "raw_text": hard_text(label, n % 6, other)})
                intent["hard"][key] = label.lower()
            n += 1

            # Distribution prompts: one refused request, invalid hard intents
            # answer in prose only, everything else cycles through JSON styles.
            if utt == "u03" and variant == "A":
                fixtures.append({"utt_id": utt, "variant": variant, "mode": "distribution", "error": "refused"})
                intent["distribution"][key] = None
            elif code in "XE":
                fixtures.append({"utt_id": utt, "variant": variant, "mode": "distribution",
                                 "raw_text": "The emotion is unclear, so I will not give probabilities."})
                intent["distribution"][key] = None
            else:
                text, raw = dist_text(CODE[code], vi, (ui + vi) % 4)
                fixtures.append({"utt_id": utt, "variant": variant, "mode": "distribution", "raw_text": text})
                intent["distribution"][key] = raw

    with open(OUT / "mock_responses.jsonl", "w") as f:
        for fx in fixtures:
            f.write(json.dumps(fx) + "\n")
    (OUT / "intent.json").write_text(json.dumps(intent, indent=2, sort_keys=True) + "\n")
    config = {
        "run_id": "golden12",
        "datasets": ["golden12.json"],
        "adapter": {"kind": "mock", "fixtures": "mock_responses.jsonl", "model": "mock-golden"},
        "variants": VARIANTS,
        "modes": ["hard", "distribution"],
        "seed": 7,
        "output_dir": "out",
    }
    (OUT / "run_config.json").write_text(json.dumps(config, indent=2) + "\n")


if __name__ == "__main__":
    main()
