"""Versioned JSON checkpoints with exact float round-tripping.

Values serialize through Python's shortest-repr float formatting, so a
save/load cycle reproduces every parameter bit for bit.
"""

import json

from ..errors import ConfigError
from .networks import Network, NetworkSpec, build

FORMAT_VERSION = 1


def checkpoint_dict(net):
    return {
        "format_version": FORMAT_VERSION,
        "seed": net.seed,
        "spec": net.spec.to_dict(),
        "parameters": {
            name: {"shape": list(p.data.shape), "values": p.data.reshape(-1).tolist()}
            for name, p in sorted(net.parameters.items())
        },
    }


def save_checkpoint(net, path):
    with open(path, "w") as fh:
        json.dump(checkpoint_dict(net), fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_checkpoint(path):
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format_version") != FORMAT_VERSION:
        raise ConfigError(f"unsupported checkpoint format: {doc.get('format_version')}")
    spec = NetworkSpec.from_dict(doc["spec"])
    net = build(spec, seed=doc.get("seed", 0))
    expected = set(net.parameters)
    stored = set(doc["parameters"])
    if expected != stored:
        raise ConfigError(
            f"checkpoint parameters do not match spec: missing {sorted(expected - stored)}, "
            f"unexpected {sorted(stored - expected)}"
        )
    net.set_parameter_values({k: v["values"] for k, v in doc["parameters"].items()})
    return net
