"""Seeded generator for a desk-scale synthetic patent-claim corpus.

Produces claim records in the standard JSONL shape: template-driven
independent claims plus dependent claims that reference them.  The text is
deliberately formulaic (patent boilerplate) so small n-gram models have
something to learn, while slot choices keep every claim distinct.

Run directly to write a corpus file:

    python -m aekit.synth --out claims.jsonl --seed 7 --target-bytes 2000000
"""

from __future__ import annotations

import argparse
import random

from .corpus import ClaimRecord, Corpus, ingest, write_jsonl

_DEVICES = [
    "apparatus", "system", "device", "assembly", "controller", "module",
    "sensor unit", "processing unit", "network node", "display panel",
    "power converter", "cooling unit", "storage device", "antenna array",
    "valve assembly", "drive mechanism", "imaging device", "battery pack",
]

_COMPONENTS = [
    "a housing", "a processor", "a memory", "a sensor", "a transceiver",
    "a power supply", "a display", "a heat sink", "a circuit board",
    "an actuator", "a fastener", "a control circuit", "a data bus",
    "an enclosure", "a filter element", "a communication interface",
    "a gear train", "a fluid channel", "an optical lens", "a spring member",
]

_COUPLINGS = [
    "coupled to", "mounted on", "disposed within", "connected to",
    "attached to", "in communication with", "positioned adjacent to",
    "electrically connected to", "thermally coupled to", "secured to",
]

_ACTIONS = [
    "receive a measurement signal from the sensor",
    "store configuration data in the memory",
    "transmit a status message over a wireless link",
    "regulate a supply voltage of the power supply",
    "detect a fault condition of the actuator",
    "compute a calibration value for the sensor",
    "control a rotational speed of the drive mechanism",
    "monitor a temperature of the housing",
    "adjust a brightness level of the display",
    "route data packets through the communication interface",
    "filter noise from the measurement signal",
    "generate an alert when a threshold is exceeded",
]

_QUALITIES = [
    "a substantially planar surface",
    "a thermally conductive material",
    "a corrosion resistant coating",
    "an adjustable mounting bracket",
    "a sealed outer enclosure",
    "a flexible printed circuit",
    "a replaceable filter cartridge",
    "a low power operating mode",
]

_WHEREIN = [
    "the {comp} comprises {quality}",
    "the {comp} is {coupling} the {comp2}",
    "the processor is further configured to {action}",
    "the {comp} includes a plurality of {plural}",
    "a surface of the {comp} defines an opening for receiving the {comp2}",
]

_PLURALS = [
    "mounting holes", "cooling fins", "signal lines", "memory cells",
    "fastening tabs", "sensor electrodes", "ventilation slots",
]

_CPCS = ["G06N", "G06F", "H04L", "F16H", "H01M"]


def _strip_article(component: str) -> str:
    for art in ("a ", "an "):
        if component.startswith(art):
            return component[len(art) :]
    return component


def _independent_text(rng: random.Random) -> str:
    device = rng.choice(_DEVICES)
    n_parts = rng.randint(2, 4)
    parts = rng.sample(_COMPONENTS, n_parts + 1)
    clauses = [parts[0]]
    for comp in parts[1:]:
        clauses.append(f"{comp} {rng.choice(_COUPLINGS)} the {_strip_article(parts[0])}")
    body = "; ".join(clauses[:-1]) + "; and " + clauses[-1]
    article = "An" if device[0] in "aeiou" else "A"
    sentence = f"{article} {device} comprising: {body}."
    if rng.random() < 0.6:
        sentence += (
            f" The {device} is configured to {rng.choice(_ACTIONS)}"
            f" and to {rng.choice(_ACTIONS)}."
        )
    return sentence


def _dependent_text(rng: random.Random, device: str, parent_no: int) -> str:
    template = rng.choice(_WHEREIN)
    comp = _strip_article(rng.choice(_COMPONENTS))
    comp2 = _strip_article(rng.choice(_COMPONENTS))
    clause = template.format(
        comp=comp,
        comp2=comp2,
        coupling=rng.choice(_COUPLINGS),
        action=rng.choice(_ACTIONS),
        quality=rng.choice(_QUALITIES),
        plural=rng.choice(_PLURALS),
    )
    return f"The {device} of claim {parent_no}, wherein {clause}."


def generate_claims(seed: int = 7, target_bytes: int = 2_000_000) -> Corpus:
    """Generate records until the total claim text reaches target_bytes."""
    rng = random.Random(seed)
    records: list[ClaimRecord] = []
    total = 0
    patent_no = 0
    while total < target_bytes:
        patent_no += 1
        patent_id = f"US{10_000_000 + patent_no}"
        year = rng.randint(2015, 2021)
        cpc = rng.choice(_CPCS)
        device = rng.choice(_DEVICES)
        text = _independent_text(rng)
        records.append(
            ClaimRecord(
                patent_id=patent_id, claim_no=1, parent_claim_no=None,
                text=text, cpc=cpc, year=year,
            )
        )
        total += len(text)
        n_dependent = rng.randint(0, 3)
        for claim_no in range(2, 2 + n_dependent):
            # Dependents may chain: parent is either claim 1 or the previous one.
            parent = 1 if claim_no == 2 or rng.random() < 0.5 else claim_no - 1
            dep_text = _dependent_text(rng, device, parent)
            records.append(
                ClaimRecord(
                    patent_id=patent_id, claim_no=claim_no,
                    parent_claim_no=parent, text=dep_text, cpc=cpc, year=year,
                )
            )
            total += len(dep_text)
    return ingest(records)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Write a synthetic patent-claim corpus as JSON Lines."
    )
    parser.add_argument("--out", required=True, help="output JSONL path")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--target-bytes", type=int, default=2_000_000)
    args = parser.parse_args(argv)
    corpus = generate_claims(seed=args.seed, target_bytes=args.target_bytes)
    write_jsonl(corpus, args.out)
    print(f"wrote {len(corpus.records)} claims to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
