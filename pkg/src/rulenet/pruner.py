"""Magnitude-based link pruning with retraining.

Each round removes every input-hidden link whose worst-case effect on any
output, max_p |v[p,m] * w[m,l]|, is at most 4*eta2, and every hidden-output
link with |v[p,m]| <= 4*eta2.  When no link qualifies, the single input link
with the smallest product is removed instead.  The network is retrained after
each round; a round that cannot keep accuracy at the floor is rolled back.
By default a rolled-back single link is excluded from later attempts and
pruning continues with the next candidate, so the loop ends only when every
surviving link is load-bearing; `stop_at_first_failure` ends the loop at the
first rollback instead.  Hidden nodes left with no live input or no live
output links are deleted afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .encoder import EncodedDataset
from .errors import ConfigError, PruneError
from .network import Network, ObjectiveParams, accuracy
from .trainer import TrainConfig, retrain


@dataclass(frozen=True)
class PruneConfig:
    eta1: float = 0.35
    eta2: float = 0.1
    accuracy_floor: float = 0.90
    # Every round either removes or permanently excludes at least one link,
    # so the loop self-terminates within ~2x the initial link count; the cap
    # is a reported safeguard, not an expected stop.
    max_rounds: int = 800
    # When a warm-started retrain lands below the acceptance bar, try this
    # many fresh (seeded) reinitializations of the surviving topology before
    # rolling the round back.
    retrain_restarts: int = 2
    stop_at_first_failure: bool = False
    # A round is accepted only while accuracy stays within this drop of the
    # last accepted state (floor as backstop); removals must not degrade the
    # network, they may only shed redundancy.  Set to 1.0 to accept anything
    # above the floor.
    max_accuracy_drop: float = 0.01

    def __post_init__(self):
        if self.eta1 + self.eta2 >= 0.5:
            raise ConfigError(
                f"eta1 + eta2 must be < 0.5, got {self.eta1 + self.eta2}"
            )
        if not 0 < self.accuracy_floor <= 1:
            raise ConfigError("accuracy_floor must be in (0, 1]")
        if self.max_rounds <= 0:
            raise ConfigError("max_rounds must be positive")
        if self.retrain_restarts < 0:
            raise ConfigError("retrain_restarts must be >= 0")
        if not 0 < self.max_accuracy_drop <= 1:
            raise ConfigError("max_accuracy_drop must be in (0, 1]")


@dataclass
class PruneRound:
    removed_input: int
    removed_output: int
    forced_single: bool
    retrain_iterations: int
    accuracy: float
    links_left: int
    restarts_used: int = 0
    rolled_back: bool = False


@dataclass
class PruneReport:
    initial_links: int
    final_links: int
    final_accuracy: float
    rounds: list[PruneRound] = field(default_factory=list)
    restored_last_good: bool = False
    hit_max_rounds: bool = False
    removed_hidden: list[int] = field(default_factory=list)
    irrelevant_inputs: list[int] = field(default_factory=list)  # 1-based

    def to_text(self) -> str:
        lines = [
            f"initial_links: {self.initial_links}",
            f"final_links: {self.final_links}",
            f"final_accuracy: {self.final_accuracy!r}",
            f"restored_last_good: {self.restored_last_good}",
            f"hit_max_rounds: {self.hit_max_rounds}",
            f"removed_hidden_nodes: {self.removed_hidden}",
            f"irrelevant_inputs: {self.irrelevant_inputs}",
            "rounds (in, out, forced, retrain_iters, accuracy, links_left, "
            "restarts, rolled_back):",
        ]
        for r in self.rounds:
            lines.append(
                f"  {r.removed_input} {r.removed_output} "
                f"{int(r.forced_single)} {r.retrain_iterations} "
                f"{r.accuracy!r} {r.links_left} {r.restarts_used} "
                f"{int(r.rolled_back)}"
            )
        return "\n".join(lines) + "\n"


def _products(net: Network) -> np.ndarray:
    """max over outputs of |v[p,m] * w[m,l]| for every input link."""
    vmax = np.max(np.abs(net.v * net.mask_v), axis=0)  # (h,)
    return np.abs(net.w) * vmax[:, None]


def removable_input_weights(net: Network, eta2: float) -> set[tuple[int, int]]:
    """Unmasked (hidden m, input l) links passing the product test."""
    prod = _products(net)
    ok = (prod <= 4.0 * eta2) & (net.mask_w == 1)
    return {(int(m), int(l)) for m, l in zip(*np.nonzero(ok))}


def removable_output_weights(net: Network, eta2: float) -> set[tuple[int, int]]:
    """Unmasked (hidden m, output p) links passing the magnitude test."""
    ok = (np.abs(net.v) <= 4.0 * eta2) & (net.mask_v == 1)
    return {(int(m), int(p)) for p, m in zip(*np.nonzero(ok))}


def _delete_dead_hidden(net: Network) -> tuple[Network, list[int]]:
    """Drop hidden nodes with no live input or no live output links."""
    alive = (net.mask_w.sum(axis=1) > 0) & (net.mask_v.sum(axis=0) > 0)
    if alive.all():
        return net, []
    if not alive.any():
        # Keep one node to preserve a valid shape; all its links are masked.
        alive[0] = True
    dead = [int(i) for i in np.nonzero(~alive)[0]]
    pruned = Network(
        w=net.w[alive], v=net.v[:, alive],
        mask_w=net.mask_w[alive], mask_v=net.mask_v[:, alive],
    )
    return pruned, dead


def _retrain_with_restarts(net: Network, data, params, prune_cfg, train_cfg,
                           round_index, bar):
    current, train_rep = retrain(net, data, params, train_cfg)
    acc = accuracy(current, data)
    restarts = 0
    while acc < bar and restarts < prune_cfg.retrain_restarts:
        restarts += 1
        rng = np.random.default_rng(
            train_cfg.seed * 10007 + round_index * 101 + restarts)
        fresh = Network(
            w=rng.uniform(-1.0, 1.0, size=net.w.shape) * net.mask_w,
            v=rng.uniform(-1.0, 1.0, size=net.v.shape) * net.mask_v,
            mask_w=net.mask_w.copy(), mask_v=net.mask_v.copy(),
        )
        candidate, cand_rep = retrain(fresh, data, params, train_cfg)
        cand_acc = accuracy(candidate, data)
        if cand_acc > acc:
            current, acc, train_rep = candidate, cand_acc, cand_rep
    return current, acc, train_rep.iterations, restarts


def prune(net: Network, data: EncodedDataset, params: ObjectiveParams,
          prune_cfg: PruneConfig, train_cfg: TrainConfig
          ) -> tuple[Network, PruneReport]:
    """Run the pruning loop on an already trained network."""
    acc = accuracy(net, data)
    if acc < prune_cfg.accuracy_floor:
        raise PruneError(
            f"initial accuracy {acc:.4f} below floor {prune_cfg.accuracy_floor}"
        )

    current = net.copy()
    last_good = current.copy()
    last_acc = acc
    report = PruneReport(initial_links=current.link_count(),
                         final_links=current.link_count(),
                         final_accuracy=acc)
    blacklist: set[tuple[int, int]] = set()
    batch_mode = True

    for round_index in range(prune_cfg.max_rounds):
        in_set: set[tuple[int, int]] = set()
        out_set: set[tuple[int, int]] = set()
        if batch_mode:
            in_set = removable_input_weights(current, prune_cfg.eta2)
            out_set = removable_output_weights(current, prune_cfg.eta2)
        forced = False
        single: tuple[int, int] | None = None
        if not in_set and not out_set:
            prod = _products(current)
            pairs = [
                (int(m), int(l))
                for m, l in zip(*np.nonzero(current.mask_w == 1))
                if (int(m), int(l)) not in blacklist
            ]
            if not pairs:
                break  # every surviving input link is load-bearing
            single = min(pairs, key=lambda ml: (prod[ml], ml))
            in_set = {single}
            forced = True
        for m, l in in_set:
            current.mask_w[m, l] = 0
            current.w[m, l] = 0.0
        for m, p in out_set:
            current.mask_v[p, m] = 0
            current.v[p, m] = 0.0

        bar = max(prune_cfg.accuracy_floor,
                  last_acc - prune_cfg.max_accuracy_drop)
        current, acc, iters, restarts = _retrain_with_restarts(
            current, data, params, prune_cfg, train_cfg, round_index, bar)
        ok = acc >= bar
        report.rounds.append(PruneRound(
            removed_input=len(in_set), removed_output=len(out_set),
            forced_single=forced, retrain_iterations=iters,
            accuracy=acc, links_left=current.link_count(),
            restarts_used=restarts, rolled_back=not ok,
        ))
        if ok:
            last_good = current.copy()
            last_acc = acc
            continue
        current = last_good.copy()
        report.restored_last_good = True
        if prune_cfg.stop_at_first_failure:
            break
        if forced and single is not None:
            blacklist.add(single)
        else:
            batch_mode = False  # batch was too aggressive; go link by link
    else:
        report.hit_max_rounds = True

    current, dead = _delete_dead_hidden(current)
    report.removed_hidden = dead
    report.irrelevant_inputs = [
        int(l) + 1 for l in np.nonzero(current.mask_w.sum(axis=0) == 0)[0]
    ]
    report.final_links = current.link_count()
    report.final_accuracy = accuracy(current, data)
    return current, report
