#!/usr/bin/env python3
# Copyright 2026 The Harness Authors
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
"""Writes the synthetic fixture set under fixtures/.

Everything is generated from a fixed seed; rerunning gives identical files.
The golden report is produced separately by running the pipeline
(tests/cli/golden.cmake with UPDATE_GOLDEN=ON).
"""

import json
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

THEMES = [
    {
        "name": "electrical",
        "events": ["Arc flash at switchgear", "Shock during breaker racking", "Energized conductor contact"],
        "places": ["Substation 12", "Building 801 electrical room", "Switchyard B"],
        "pairs": [
            ("arc flash during breaker racking", "remote racking device and arc rated PPE"),
            ("contact with energized 480V conductor", "lockout/tagout with zero energy verification"),
            ("backfeed from temporary generator", "isolation of alternate sources before work"),
        ],
        "words": "breaker switchgear 480V panel voltage tester lockout tagout energized conductor racking",
    },
    {
        "name": "lifting",
        "events": ["Dropped load during crane lift", "Rigging failure on hoist", "Crane boom contact"],
        "places": ["Assembly hall", "Laydown yard", "Reactor building bay"],
        "pairs": [
            ("dropped load from overloaded sling", "rigging inspection and rated capacity check"),
            ("crane boom contact with overhead line", "spotter and minimum approach distance"),
            ("pinch point during load landing", "tag lines and hands-free landing"),
        ],
        "words": "crane hoist sling rigging load lift boom shackle spotter capacity",
    },
    {
        "name": "confined",
        "events": ["Oxygen deficiency in vault", "Entrant collapse in tank", "Vault entry without permit"],
        "places": ["Utility vault 4", "Storage tank T-2", "Pump pit"],
        "pairs": [
            ("oxygen deficient atmosphere in vault", "continuous atmospheric monitoring"),
            ("entrant unable to self rescue", "attendant with retrieval system"),
            ("toxic gas release in tank", "ventilation and permit required entry"),
        ],
        "words": "vault tank confined space entry atmosphere oxygen gas monitor attendant permit",
    },
    {
        "name": "chemical",
        "events": ["Acid splash during transfer", "Solvent vapor exposure", "Incompatible chemical mixing"],
        "places": ["Chemistry lab 3", "Waste storage pad", "Plating shop"],
        "pairs": [
            ("acid splash to face during transfer", "face shield and closed transfer system"),
            ("solvent vapor inhalation", "local exhaust ventilation"),
            ("reaction from incompatible waste", "segregated storage and compatibility review"),
        ],
        "words": "acid solvent vapor chemical transfer drum waste fume hood splash exposure",
    },
    {
        "name": "hotwork",
        "events": ["Fire during welding", "Sparks ignite insulation", "Burn from cutting torch"],
        "places": ["Machine shop", "Pipe gallery", "Roof of Building 2"],
        "pairs": [
            ("sparks igniting combustible insulation", "hot work permit and fire watch"),
            ("burn from torch slag", "flame resistant clothing"),
            ("welding fume exposure", "fume extraction at the arc"),
        ],
        "words": "welding torch cutting sparks fire watch hot work insulation slag fume",
    },
    {
        "name": "height",
        "events": ["Fall from scaffold", "Ladder slip", "Dropped tool from platform"],
        "places": ["Cooling tower", "Mezzanine", "Stack platform"],
        "pairs": [
            ("fall from unguarded scaffold edge", "guardrails and personal fall arrest"),
            ("ladder slip on wet floor", "ladder tie off and footing"),
            ("dropped tool striking worker below", "tool lanyards and barricaded drop zone"),
        ],
        "words": "scaffold ladder platform fall harness guardrail height roof anchor",
    },
]

POLICIES = [
    ("POL-ARC-01", "Remote racking",
     "A remote racking device and arc rated PPE are required for breaker racking in switchgear."),
    ("POL-ARC-02", "Arc flash labeling", "An arc flash boundary is posted at the panel before covers are removed."),
    ("POL-LOTO-01", "Zero energy verification",
     "Lockout/tagout with zero energy verification precedes work on any energized conductor."),
    ("POL-LOTO-02", "Alternate sources",
     "Isolation of alternate sources before work covers temporary generator backfeed paths."),
    ("POL-CRANE-01", "Rigging", "A rigging inspection and rated capacity check precede every crane lift."),
    ("POL-CRANE-02", "Overhead lines", "A spotter and minimum approach distance are required near overhead lines."),
    ("POL-CSE-01", "Confined space entry",
     "Permit required entry with continuous atmospheric monitoring applies to every vault and tank."),
    ("POL-HOT-01", "Hot work", "A hot work permit and fire watch are required for welding near combustible insulation."),
    ("POL-FALL-01", "Fall protection",
     "Guardrails and personal fall arrest are required at unprotected edges above four feet."),
]

FILLER = [
    "The crew had completed the pre-job briefing.",
    "Supervision was notified within the hour.",
    "The work package had been revised twice.",
    "Weather conditions were dry and clear.",
    "The area was posted as a controlled zone.",
    "A stop work was called by the field lead.",
    "Lessons learned were shared at the safety meeting.",
    "Corrective actions were tracked to closure.",
]


def make_incidents(rng):
    docs = []
    n = 0
    for round_ in range(6):
        for theme in THEMES:
            n += 1
            doc_id = f"INC-{n:03d}"
            event = rng.choice(theme["events"])
            place = rng.choice(theme["places"])
            chosen = rng.sample(theme["pairs"], 2)
            words = theme["words"].split()
            lines = [f"During work at {place} the crew handled {', '.join(rng.sample(words, 4))}."]
            lines.append(rng.choice(FILLER))
            for hazard, control in chosen:
                if rng.random() < 0.8:
                    lines.append(f"Hazard: {hazard}; control: {control}.")
                else:
                    lines.append(f"Hazard: {hazard}.")
            lines.append(rng.choice(FILLER))
            lines.append(f"Equipment involved: {' '.join(rng.sample(words, 5))}.")
            doc = {
                "doc_id": doc_id,
                "event_name": f"{event} at {place}",
                "location": place,
                "summary": f"{event} involving {chosen[0][0]}.",
                "body": " ".join(lines),
                "source_tag": f"synthetic-{theme['name']}",
            }
            if round_ != 5:
                doc["event_date"] = f"20{18 + round_}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
            docs.append(doc)
    return docs


WORKPLAN = {
    "doc_id": "WP-001",
    "event_name": "Replace 480V breaker in Substation 12 switchgear",
    "location": "Substation 12",
    "summary": "Remove and replace a failed 480V breaker in the main switchgear lineup, including racking and testing.",
    "body": (
        "Scope: remove the failed 480V breaker from cubicle 3 of the main switchgear, install the replacement and "
        "perform functional testing. The work requires breaker racking, use of a voltage tester and a temporary "
        "generator to supply critical loads. A mobile crane lifts the replacement breaker to the switchgear pad. "
        "Controls: remote racking device to prevent arc flash during breaker racking; isolation of the temporary "
        "generator to stop backfeed; lockout/tagout with zero energy verification."
    ),
    "source_tag": "workplan",
}

SUMMARY = {
    "scope": "Replace a failed 480V breaker in the Substation 12 main switchgear and test it.",
    "components": ["480V breaker", "switchgear", "voltage tester", "temporary generator", "mobile crane"],
    "operational_context": "Substation 12 switchgear pad with critical loads on a temporary generator.",
    "controls_mentioned": [
        "remote racking device to prevent arc flash during breaker racking",
        "isolation of the temporary generator to stop backfeed",
        "lockout/tagout with zero energy verification",
    ],
}

FMEA_MODES = [
    {"description": "Arc flash while racking the breaker out of cubicle 3",
     "hazard": "arc flash during breaker racking"},
    {"description": "Worker contacts a conductor energized by generator backfeed",
     "hazard": "backfeed from temporary generator"},
    {"description": "Replacement breaker dropped during the crane lift",
     "hazard": "dropped load from overloaded sling"},
]
FMEA_CAUSES = [
    ["racking performed locally at the cubicle", "degraded breaker stabs"],
    ["generator transfer switch left closed", "incomplete isolation boundary"],
    ["sling capacity below load weight", "missed rigging inspection"],
]
FMEA_EFFECTS = [
    {"effects": ["severe burns", "switchgear damage"], "severity": 5, "likelihood": 3,
     "mitigations": ["remote racking device and arc rated PPE", "arc flash boundary posted at the panel"]},
    {"effects": ["electrical shock"], "severity": 5, "likelihood": 2,
     "mitigations": ["isolation of alternate sources before work", "lockout/tagout with zero energy verification"]},
    {"effects": ["crushed equipment", "struck-by injury"], "severity": 3, "likelihood": 2,
     "mitigations": ["rigging inspection and rated capacity check"]},
]


def make_transcript():
    return {
        "backend_id": "fixture-v1",
        "rules": [
            {"template": "summarize", "response": SUMMARY},
            {"template": "keywords", "response": {"keywords": ["breaker racking", "480V switchgear", "arc flash",
                                                               "lockout tagout", "crane lift"]}},
            {"template": "interpret_decompose", "response": {"error": "unavailable"}},
            {"template": "expand_paraphrase", "contains": "480V breaker",
             "response": {"paraphrases": ["Replace 480V breaker in Substation 12 switchgear",
                                          "480V breaker replacement in the Substation 12 switchgear",
                                          "unrelated paperwork review"]}},
            {"template": "expand_paraphrase", "response": {"paraphrases": ["breaker racking arc flash 480V switchgear",
                                                                           "office filing audit"]}},
            {"template": "extract_pairs", "contains": "INC-001",
             "response": {"pairs": [{"hazard": "arc flash during breaker racking",
                                     "control": "remote racking device and arc rated PPE", "confidence": 0.9}]}},
            {"template": "extract_pairs", "response": {"pairs": []}},
            {"template": "fmea_identify", "response": {"failure_modes": FMEA_MODES}},
            {"template": "fmea_causes", "response": {"causes": FMEA_CAUSES}},
            {"template": "fmea_effects", "response": {"analyses": FMEA_EFFECTS}},
            {"template": "narrative", "response": (
                "The planned breaker replacement repeats conditions seen in past switchgear events, where racking "
                "without remote devices led to arc flash exposure [INC-001].\n\n"
                "Generator backfeed and crane handling add energy sources that past events controlled through "
                "isolation and rigging inspection [INC-007].\n\n"
                "Approval should wait until the isolation boundary includes the temporary generator.")},
            {"template": "judge_criterion", "response": {"score": 4, "justification": "fixture judge"}},
            {"template": "answer_agreement", "response": {"score": 1.0}},
            {"template": "answer", "response": "See the cited passage."},
        ],
    }


def make_qa(rng, docs):
    qa = []
    picks = rng.sample(docs, 20)
    for d in picks:
        body = d["body"]
        start = body.index("Hazard: ")
        end = body.index(".", start)
        sentence = body[start:end]
        qa.append({
            "question": f"What hazard was recorded in {d['doc_id']} ({d['event_name']})?",
            "reference": sentence,
            "source_doc": d["doc_id"],
        })
    return qa


def write_jsonl(path, rows):
    path.write_text("".join(json.dumps(r, sort_keys=True) + "\n" for r in rows))


def main():
    rng = random.Random(20240611)
    ROOT.mkdir(parents=True, exist_ok=True)
    docs = make_incidents(rng)
    write_jsonl(ROOT / "incidents.jsonl", docs)
    write_jsonl(ROOT / "policies.jsonl", [
        {"doc_id": pid, "event_name": title, "summary": title, "body": body, "source_tag": "policy", "origin": "sbms"}
        for pid, title, body in POLICIES
    ])
    (ROOT / "workplan.json").write_text(json.dumps(WORKPLAN, indent=2, sort_keys=True) + "\n")
    (ROOT / "transcript.json").write_text(json.dumps(make_transcript(), indent=2, sort_keys=True) + "\n")
    write_jsonl(ROOT / "qa.jsonl", make_qa(rng, docs))
    (ROOT / "feedback_exclude.json").write_text(json.dumps({
        "event_grades": {"INC-001": 0, "INC-002": 2},
        "hazard_edits": [], "approved": False, "author": "sme-fixture", "at": "2026-01-05T10:00:00.000Z",
    }, indent=2, sort_keys=True) + "\n")
    (ROOT / "harness.conf").write_text(
        "# Fixture configuration: offline mock embedder and scripted generation backend.\n"
        "embedder = mock-64\n"
        "cross_encoder = jaccard\n"
        "chunk_max_tokens = 64\n"
        "chunk_overlap = 8\n"
        "final_k = 5\n"
    )


if __name__ == "__main__":
    main()
