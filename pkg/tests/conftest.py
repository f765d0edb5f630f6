from dataclasses import dataclass

import pytest

from spikesoc import InferenceResult, dense_infer, run_network
from helpers import Instance, conditioned_instance, make_rng

CORPUS_SEED = 0x5C0FFEE
CORPUS_SIZE = 1000


@dataclass
class InstanceRuns:
    """One corpus instance with every configuration the criteria compare."""

    inst: Instance
    untruncated: InferenceResult          # early stop off
    relaxed: InferenceResult              # early stop off, zero pixels spike
    dense: InferenceResult                # brute-force reference


@pytest.fixture(scope="session")
def corpus():
    """The shared random-network corpus the acceptance criteria run over.

    Every instance is conditioned so its decision is an output spike
    strictly before the last timestep; last-timestep events then cannot
    change the outcome, which is what makes the zero-pixel encoding check
    well-posed. Unconditioned coverage (fallback decisions, silent layers)
    lives in the regular oracle tests.
    """
    rng = make_rng(CORPUS_SEED)
    runs = []
    for _ in range(CORPUS_SIZE):
        inst = conditioned_instance(rng)
        runs.append(
            InstanceRuns(
                inst=inst,
                untruncated=run_network(inst.model, inst.frame, early_stop=False),
                relaxed=run_network(
                    inst.model, inst.frame, early_stop=False, spike_on_zero=True
                ),
                dense=dense_infer(inst.model, inst.frame),
            )
        )
    return runs
