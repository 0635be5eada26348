"""Respiration-state clustering, modal-state selection and cardiac binning.

2-D traces are already quantized to integer pixels, so the state key is the
combined motion vector itself. 1-D surrogate scores are divided into
equal-width buckets over the observed range. All readouts governed by a
selected navigator join the bin, navigation readouts included; each readout
is labelled with a cardiac phase from the fraction of its RR interval elapsed
(readouts outside the trigger range are dropped and counted).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NoTriggers


@dataclass
class BinSelection:
    states: dict  # state key -> sorted navigator indices (0-based)
    selected_state: object
    selected_navigators: list
    selected_readouts: list
    fraction_selected: float
    cardiac_phase_of_readout: dict  # readout index -> phase in 0..P-1
    phases: int
    dropped_readouts: int = 0

    def to_json_dict(self):
        return {
            "states": [{"key": list(k) if isinstance(k, tuple) else k, "navigators": v}
                       for k, v in sorted(self.states.items(), key=lambda kv: str(kv[0]))],
            "selected_state": list(self.selected_state) if isinstance(self.selected_state, tuple)
            else self.selected_state,
            "selected_navigators": self.selected_navigators,
            "selected_readouts": self.selected_readouts,
            "fraction_selected": self.fraction_selected,
            "cardiac_phase_of_readout": {str(k): v for k, v in
                                         sorted(self.cardiac_phase_of_readout.items())},
            "phases": self.phases,
            "dropped_readouts": self.dropped_readouts,
        }

    @classmethod
    def from_json_dict(cls, doc):
        def key_of(k):
            return tuple(k) if isinstance(k, list) else k
        return cls(
            states={key_of(s["key"]): list(s["navigators"]) for s in doc["states"]},
            selected_state=key_of(doc["selected_state"]),
            selected_navigators=list(doc["selected_navigators"]),
            selected_readouts=list(doc["selected_readouts"]),
            fraction_selected=doc["fraction_selected"],
            cardiac_phase_of_readout={int(k): v for k, v in
                                      doc["cardiac_phase_of_readout"].items()},
            phases=doc["phases"],
            dropped_readouts=doc.get("dropped_readouts", 0),
        )


def cluster_states(trace, buckets_1d=8):
    """Map of motion state -> navigator indices (a partition of 0..I-1)."""
    if len(trace) == 0:
        raise ConfigError("empty motion trace")
    states = {}
    if trace.mode == "2d":
        for i, (x, y) in enumerate(trace.m_comb):
            states.setdefault((int(x), int(y)), []).append(i)
        return states
    scores = trace.scores
    lo, hi = float(scores.min()), float(scores.max())
    if hi == lo:
        return {0: list(range(len(scores)))}
    width = (hi - lo) / buckets_1d
    for i, s in enumerate(scores):
        b = min(int((s - lo) / width), buckets_1d - 1)
        states.setdefault(b, []).append(i)
    return states


def _state_sort_key(item):
    key, navs = item
    vec = np.atleast_1d(np.asarray(key, dtype=float))
    # modal first; ties prefer the smallest-norm state, then lexicographic
    return (-len(navs), float(np.sum(vec**2)), tuple(vec))


def select_bin(states, raw, phases, select="modal"):
    """Select a respiration state and gather its readouts with cardiac labels.

    select="modal" keeps the most frequent state (ties per `_state_sort_key`);
    select="all" keeps every navigator, which is the no-navigation arm.
    """
    if phases < 1:
        raise ConfigError("phases must be >= 1")
    triggers = np.asarray(raw.trigger_times_s, dtype=float)
    if triggers.size < 2:
        raise NoTriggers("need at least two trigger times to bracket readouts")
    schedule = raw.schedule
    n_navs = schedule.nav_count()

    if select == "all":
        selected_state = "all"
        selected_navs = sorted(i for navs in states.values() for i in navs)
    elif select == "modal":
        selected_state, navs = min(states.items(), key=_state_sort_key)
        selected_navs = sorted(navs)
    else:
        raise ConfigError(f"unknown selection mode {select!r}")

    nav_set = set(selected_navs)
    phase_of = {}
    dropped = 0
    selected_readouts = []
    for r in schedule.readouts:
        if r.nav_id not in nav_set:
            continue
        k = np.searchsorted(triggers, r.time_s, side="right") - 1
        if k < 0 or k >= triggers.size - 1:
            dropped += 1
            continue
        frac = (r.time_s - triggers[k]) / (triggers[k + 1] - triggers[k])
        phase_of[r.index] = min(int(phases * frac), phases - 1)
        selected_readouts.append(r.index)

    return BinSelection(
        states=states,
        selected_state=selected_state,
        selected_navigators=selected_navs,
        selected_readouts=selected_readouts,
        fraction_selected=len(selected_navs) / n_navs,
        cardiac_phase_of_readout=phase_of,
        phases=phases,
        dropped_readouts=dropped,
    )
