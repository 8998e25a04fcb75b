"""Rule extraction from a pruned network.

Hidden activations are discretized by one-pass clustering with radius eps
(halved until the discretized network keeps the required accuracy).  The
discrete activation combinations are enumerated with the network outputs they
produce; conjunctive rules with a perfect cover are induced over that table,
then again per hidden node from its live input bits, and substitution plus an
infeasibility filter turns them into input-level classification rules.  A
hidden node with too many live inputs is handled by training and pruning a
subnetwork from its inputs to its discrete activation values and recursing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .encoder import BIAS_INDEX, EncodedDataset, EncodingScheme, feasible
from .errors import ConfigError, ExtractionError, PruneError, SplitRequired
from .network import Network, ObjectiveParams, init_random, output_layer
from .pruner import PruneConfig, prune
from .trainer import TrainConfig, train

_BIAS_COL = BIAS_INDEX - 1  # 0-based column of the constant-one input


@dataclass(frozen=True)
class ExtractConfig:
    epsilon0: float = 0.6
    required_accuracy: float = 0.9
    epsilon_min: float = 1e-6
    table_cap: int = 4096  # max rows in any enumerated table
    fanin_cap: int = 15    # live input bits per node before splitting
    default_class: int = 1
    split_enabled: bool = True
    split_hidden: int = 4
    split_depth_max: int = 3
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.epsilon0 < 1:
            raise ConfigError("epsilon0 must be in (0, 1)")
        if self.epsilon_min <= 0 or self.epsilon_min >= self.epsilon0:
            raise ConfigError("epsilon_min must be in (0, epsilon0)")
        if self.table_cap < 2 or self.fanin_cap < 1:
            raise ConfigError("table_cap/fanin_cap too small")


# ---------------------------------------------------------------------------
# Step 1: activation discretization
# ---------------------------------------------------------------------------

@dataclass
class ClusterTable:
    """Discrete activation values of one hidden node."""

    eps: float
    reps: np.ndarray    # representatives, ascending
    counts: np.ndarray  # members per representative

    @property
    def size(self) -> int:
        return len(self.reps)

    def assign(self, value: float) -> int:
        """Index of the nearest representative (ties to the lowest index)."""
        return int(np.argmin(np.abs(self.reps - value)))

    def assign_many(self, values: np.ndarray) -> np.ndarray:
        return np.argmin(np.abs(values[:, None] - self.reps[None, :]), axis=1)


def cluster_activations(values, eps: float) -> ClusterTable:
    """One pass over `values` in dataset order.

    A value joins the nearest cluster if it is within eps of the value that
    opened it, else it opens a new cluster; representatives are finalized as
    the mean of their members.
    """
    if not 0 < eps < 1:
        raise ConfigError(f"eps must be in (0, 1), got {eps}")
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ExtractionError("cannot cluster an empty activation list")
    openers: list[float] = []
    counts: list[int] = []
    sums: list[float] = []
    for v in values:
        if openers:
            dists = [abs(v - h) for h in openers]
            j = int(np.argmin(dists))
            if dists[j] <= eps:
                counts[j] += 1
                sums[j] += v
                continue
        openers.append(float(v))
        counts.append(1)
        sums.append(float(v))
    reps = np.array([s / c for s, c in zip(sums, counts)])
    order = np.argsort(reps, kind="stable")
    return ClusterTable(eps=eps, reps=reps[order],
                        counts=np.array(counts, dtype=int)[order])


def check_cluster_fidelity(net: Network, tables: list[ClusterTable],
                           data: EncodedDataset, required_accuracy: float
                           ) -> tuple[bool, float]:
    """Accuracy of the network with activations snapped to their clusters."""
    A = np.tanh(data.X @ net.w.T)
    snapped = np.empty_like(A)
    for m, table in enumerate(tables):
        snapped[:, m] = table.reps[table.assign_many(A[:, m])]
    pred = np.argmax(output_layer(net, snapped), axis=1)
    acc = float(np.mean(pred == data.labels))
    return acc >= required_accuracy, acc


def auto_epsilon(net: Network, data: EncodedDataset, required_accuracy: float,
                 eps0: float, eps_min: float = 1e-6
                 ) -> tuple[float, list[ClusterTable], float]:
    """Halve eps until the discretized network keeps the required accuracy."""
    A = np.tanh(data.X @ net.w.T)
    eps = eps0
    while eps >= eps_min:
        tables = [cluster_activations(A[:, m], eps) for m in range(net.h)]
        ok, acc = check_cluster_fidelity(net, tables, data, required_accuracy)
        if ok:
            return eps, tables, acc
        eps *= 0.5
    raise ExtractionError(
        f"no eps >= {eps_min} preserves accuracy {required_accuracy}"
    )


# ---------------------------------------------------------------------------
# Step 2: discrete activation/output table
# ---------------------------------------------------------------------------

@dataclass
class OutputTable:
    combos: list[tuple[int, ...]]     # rep indices per hidden node
    alphas: list[tuple[float, ...]]
    outputs: list[tuple[float, ...]]
    classes: list[int]
    lookup: dict[tuple[int, ...], int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.lookup:
            self.lookup = {c: k for c, k in zip(self.combos, self.classes)}

    def __len__(self) -> int:
        return len(self.combos)


def enumerate_output_table(net: Network, tables: list[ClusterTable],
                           cap: int = 4096) -> OutputTable:
    sizes = [t.size for t in tables]
    total = int(np.prod(sizes))
    if total > cap:
        raise ExtractionError(
            f"{total} activation combinations exceed cap {cap}; "
            "hidden-node splitting or a larger eps is needed"
        )
    combos, alphas, outputs, classes = [], [], [], []
    for combo in itertools.product(*(range(s) for s in sizes)):
        alpha = np.array([tables[m].reps[j] for m, j in enumerate(combo)])
        S = output_layer(net, alpha)
        combos.append(combo)
        alphas.append(tuple(float(a) for a in alpha))
        outputs.append(tuple(float(s) for s in S))
        classes.append(int(np.argmax(S)))
    return OutputTable(combos, alphas, outputs, classes)


# ---------------------------------------------------------------------------
# Perfect-cover rule induction over a discrete table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteRule:
    """Conjunction of (variable, value) literals implying a consequent."""

    antecedent: tuple[tuple[int, int], ...]
    consequent: int

    def matches(self, row) -> bool:
        return all(row[var] == val for var, val in self.antecedent)


def perfect_cover_rules(rows: list[tuple[int, ...]], positive: list[bool],
                        consequent: int = 1) -> list[DiscreteRule]:
    """Minimal-antecedent conjunctions covering all positive rows and none
    of the negative ones.

    Conjunctions are enumerated breadth first by length, keeping those whose
    cover is purely positive; supersets of kept conjunctions are not explored
    (they are subsumed).  A greedy set cover over the kept conjunctions, ties
    to fewer literals then lexicographic order, selects the final rules.
    """
    if not rows:
        return []
    pos = np.asarray(positive, dtype=bool)
    if not pos.any():
        return []
    R = np.asarray(rows, dtype=int)
    n_vars = R.shape[1]
    domains = [sorted(set(int(x) for x in R[:, v])) for v in range(n_vars)]

    all_mask = np.ones(len(rows), dtype=bool)
    candidates: list[tuple[tuple[tuple[int, int], ...], np.ndarray]] = []
    frontier: list[tuple[tuple[tuple[int, int], ...], int, np.ndarray]] = [
        ((), -1, all_mask)
    ]
    while frontier:
        next_frontier = []
        for conj, last_var, mask in frontier:
            covered_pos = mask & pos
            if not covered_pos.any():
                continue
            if not (mask & ~pos).any():
                candidates.append((conj, mask))
                continue  # perfect; extensions would be subsumed
            for var in range(last_var + 1, n_vars):
                col = R[:, var]
                for val in domains[var]:
                    sub = mask & (col == val)
                    next_frontier.append((conj + ((var, val),), var, sub))
        frontier = next_frontier

    candidates.sort(key=lambda c: (len(c[0]), c[0]))
    uncovered = pos.copy()
    chosen: list[DiscreteRule] = []
    while uncovered.any():
        best = None
        best_gain = 0
        for conj, mask in candidates:
            gain = int((mask & uncovered).sum())
            if gain > best_gain:
                best, best_gain = (conj, mask), gain
        if best is None:  # cannot happen: every positive row's own
            break         # full description is a perfect conjunction
        chosen.append(DiscreteRule(best[0], consequent))
        uncovered &= ~best[1]
    return chosen


# ---------------------------------------------------------------------------
# Step 3: input tables per hidden node
# ---------------------------------------------------------------------------

@dataclass
class InputTable:
    """Discrete activation value of one node per input-bit pattern."""

    node: int
    free_bits: list[int]            # 0-based columns, bias excluded
    patterns: list[tuple[int, ...]]
    rep_idx: list[int]
    observed_only: bool
    pattern_map: dict[tuple[int, ...], int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.pattern_map:
            self.pattern_map = dict(zip(self.patterns, self.rep_idx))


def _node_inputs(net: Network, m: int, bit_map: list[int]) -> tuple[list[int], float]:
    """Live non-bias input columns of node m plus its constant contribution."""
    live = [int(l) for l in np.nonzero(net.mask_w[m] == 1)[0]]
    free = [l for l in live if bit_map[l] != _BIAS_COL]
    const = sum(float(net.w[m, l]) for l in live if bit_map[l] == _BIAS_COL)
    return free, const


def _pattern_assignments(net: Network, m: int, X: np.ndarray,
                         table: ClusterTable, bit_map: list[int]
                         ) -> np.ndarray:
    """Discrete value of node m per record, computed pattern-wise.

    The activation for each distinct bit pattern is evaluated with the same
    arithmetic the input tables use, so assignments agree bit for bit across
    all extraction paths.
    """
    free, const = _node_inputs(net, m, bit_map)
    weights = net.w[m, free]
    seen: dict[tuple[int, ...], int] = {}
    out = np.empty(X.shape[0], dtype=int)
    for i in range(X.shape[0]):
        p = tuple(int(b) for b in X[i, free])
        rep = seen.get(p)
        if rep is None:
            alpha = float(np.tanh(np.dot(np.asarray(p, float), weights) + const))
            rep = table.assign(alpha)
            seen[p] = rep
        out[i] = rep
    return out


def build_input_table(net: Network, m: int, X: np.ndarray,
                      table: ClusterTable, cfg: ExtractConfig,
                      bit_map: list[int] | None = None) -> InputTable:
    """Tabulate node m's discrete activation over its live input bits.

    All 2^fan_in patterns when that fits the table cap, otherwise only the
    patterns observed in the dataset.  Raises SplitRequired above the fan-in
    cap.
    """
    if bit_map is None:
        bit_map = list(range(net.n))
    free, const = _node_inputs(net, m, bit_map)
    if len(free) > cfg.fanin_cap:
        raise SplitRequired(m, len(free), cfg.fanin_cap)
    observed_only = 2 ** len(free) > cfg.table_cap
    if observed_only:
        observed = sorted({tuple(int(b) for b in row) for row in X[:, free]})
        patterns = observed
    else:
        patterns = [tuple(p) for p in itertools.product((0, 1), repeat=len(free))]
    weights = net.w[m, free]
    rep_idx = []
    for p in patterns:
        alpha = float(np.tanh(np.dot(np.asarray(p, dtype=float), weights) + const))
        rep_idx.append(table.assign(alpha))
    return InputTable(node=m, free_bits=list(free), patterns=patterns,
                      rep_idx=rep_idx, observed_only=observed_only)


def input_rules_for_activation(itable: InputTable, rep: int
                               ) -> list[DiscreteRule]:
    """Perfect-cover rules, over the node's input bits, for one discrete
    activation value.  Literal variables are 0-based input columns."""
    positive = [r == rep for r in itable.rep_idx]
    rules = perfect_cover_rules(itable.patterns, positive, consequent=rep)
    return [
        DiscreteRule(
            tuple((itable.free_bits[var], val) for var, val in r.antecedent),
            rep,
        )
        for r in rules
    ]


# ---------------------------------------------------------------------------
# Step 4: substitution
# ---------------------------------------------------------------------------

def substitute(output_rules: list[DiscreteRule],
               input_rules: dict[tuple[int, int], list[DiscreteRule]],
               scheme: EncodingScheme | None,
               bit_map: list[int] | None = None) -> list[DiscreteRule]:
    """Expand hidden-level rules through the input-level rules.

    Every combination of input rules for an output rule's literals is merged
    into one conjunction; combinations with contradictory bits or (when a
    scheme is given) no satisfying attribute assignment are dropped, and
    rules implied by a shorter rule with the same consequent are removed.
    """
    merged_rules: dict[tuple, int] = {}
    for orule in output_rules:
        try:
            pools = [input_rules[(m, j)] for m, j in orule.antecedent]
        except KeyError as e:
            raise ExtractionError(f"missing input rules for literal {e}") from None
        for combo in itertools.product(*pools):
            merged: dict[int, int] = {}
            ok = True
            for irule in combo:
                for bit, val in irule.antecedent:
                    if merged.setdefault(bit, val) != val:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
            if scheme is not None:
                mapped = [
                    ((bit_map[bit] if bit_map else bit) + 1, val)
                    for bit, val in merged.items()
                ]
                if not feasible(mapped, scheme):
                    continue
            ant = tuple(sorted(merged.items()))
            merged_rules.setdefault(ant, orule.consequent)

    kept: list[DiscreteRule] = []
    ants = sorted(merged_rules, key=lambda a: (len(a), a))
    for ant in ants:
        cls = merged_rules[ant]
        ant_set = set(ant)
        if any(set(k.antecedent) < ant_set and k.consequent == cls
               for k in kept):
            continue
        kept.append(DiscreteRule(ant, cls))
    kept.sort(key=lambda r: (r.consequent, len(r.antecedent), r.antecedent))
    return kept


# ---------------------------------------------------------------------------
# Hidden-node splitting (recursion through a subnetwork)
# ---------------------------------------------------------------------------

@dataclass
class SplitResult:
    rules: dict[int, list[DiscreteRule]]  # rep index -> bit-level rules
    used_fallback: bool
    warnings: list[str] = field(default_factory=list)


def split_hidden_node(net: Network, m: int, table: ClusterTable,
                      X: np.ndarray, node_rep_labels: np.ndarray,
                      cfg: ExtractConfig, params: ObjectiveParams,
                      train_cfg: TrainConfig, prune_cfg: PruneConfig,
                      bit_map: list[int], depth: int) -> SplitResult:
    """Approximate node m by a trained subnetwork over its live inputs.

    The subnetwork maps the node's input bits to indicator targets over its
    discrete activation values; it is trained, pruned, and recursed into.
    Rules that fail to reproduce the node's discretization on any training
    record are replaced by observed-pattern tabling.
    """
    if depth > cfg.split_depth_max:
        raise ExtractionError(
            f"split recursion exceeded depth {cfg.split_depth_max} at node {m}"
        )
    free, _ = _node_inputs(net, m, bit_map)
    d = table.size
    warnings: list[str] = []

    def fallback(reason: str) -> SplitResult:
        warnings.append(
            f"node {m}: falling back to observed-pattern tabling ({reason})"
        )
        observed = sorted({tuple(int(b) for b in row) for row in X[:, free]})
        weights = net.w[m, free]
        _, const = _node_inputs(net, m, bit_map)
        reps = []
        for p in observed:
            alpha = float(np.tanh(np.dot(np.asarray(p, float), weights) + const))
            reps.append(table.assign(alpha))
        itable = InputTable(node=m, free_bits=list(free), patterns=observed,
                            rep_idx=reps, observed_only=True)
        return SplitResult(
            rules={j: input_rules_for_activation(itable, j) for j in range(d)},
            used_fallback=True, warnings=warnings,
        )

    X_sub = np.concatenate([X[:, free], np.ones((X.shape[0], 1))], axis=1)
    sub_map = [bit_map[l] for l in free] + [_BIAS_COL]
    sub_data = EncodedDataset(
        X=X_sub, labels=node_rep_labels,
        class_names=tuple(f"v{j}" for j in range(d)),
    )
    subnet = init_random(X_sub.shape[1], cfg.split_hidden, max(d, 2),
                         seed=cfg.seed * 7919 + m)
    subnet, _ = train(subnet, sub_data, params, train_cfg)
    try:
        subnet, _ = prune(subnet, sub_data, params, prune_cfg, train_cfg)
    except PruneError as e:
        return fallback(f"subnetwork below accuracy floor: {e}")
    live_sub = int((subnet.mask_w.sum(axis=0) > 0)[:-1].sum())
    if live_sub >= len(free):
        return fallback("subnetwork did not reduce the connection count")

    try:
        core = _extract_core(
            subnet, X_sub, node_rep_labels, d, None, sub_map,
            cfg, params, train_cfg, prune_cfg, depth + 1,
            classes_needed=set(range(d)),
        )
    except ExtractionError as e:
        return fallback(f"subnetwork extraction failed: {e}")
    per_class = core.rules_by_class
    warnings.extend(core.warnings)

    # Verify exactly on the training records; rule disagreement anywhere
    # would silently break downstream fidelity.
    for j in range(d):
        rules = per_class.get(j, [])
        fired = np.zeros(len(X), dtype=bool)
        for rule in rules:
            mask = np.ones(len(X), dtype=bool)
            for bit, val in rule.antecedent:  # bits are X_sub columns here
                mask &= X_sub[:, bit] == val
            fired |= mask
        if not np.array_equal(fired, node_rep_labels == j):
            return fallback("subnetwork rules disagree on training records")

    mapped = {
        j: [
            DiscreteRule(
                tuple(sorted((sub_map[bit], val) for bit, val in r.antecedent)),
                j,
            )
            for r in per_class.get(j, [])
        ]
        for j in range(d)
    }
    return SplitResult(rules=mapped, used_fallback=False, warnings=warnings)


# ---------------------------------------------------------------------------
# Full extraction
# ---------------------------------------------------------------------------

@dataclass
class ExtractionResult:
    eps: float
    discretized_accuracy: float
    tables: list[ClusterTable]
    output_table: OutputTable
    output_rules: list[DiscreteRule]
    input_rules: dict[tuple[int, int], list[DiscreteRule]]
    bit_rules: list[DiscreteRule]
    default_class: int
    train_rule_classes: np.ndarray
    train_discretized_classes: np.ndarray
    disagreements: int
    warnings: list[str] = field(default_factory=list)


def predict_bit_rules(bit_rules: list[DiscreteRule], default_class: int,
                      X: np.ndarray) -> np.ndarray:
    """First-match classification of bit vectors by bit-level rules."""
    out = np.full(X.shape[0], -1, dtype=int)
    for rule in bit_rules:
        mask = np.ones(X.shape[0], dtype=bool)
        for bit, val in rule.antecedent:
            mask &= X[:, bit] == val
        out[(out == -1) & mask] = rule.consequent
    out[out == -1] = default_class
    return out


@dataclass
class _CoreResult:
    rules_by_class: dict[int, list[DiscreteRule]]
    output_rules: list[DiscreteRule]
    warnings: list[str]
    eps: float
    accuracy: float
    tables: list[ClusterTable]
    output_table: OutputTable
    input_rules: dict[tuple[int, int], list[DiscreteRule]]
    itables: dict[int, InputTable]


def _extract_core(net: Network, X: np.ndarray, labels: np.ndarray,
                  class_count: int, scheme: EncodingScheme | None,
                  bit_map: list[int], cfg: ExtractConfig,
                  params: ObjectiveParams, train_cfg: TrainConfig,
                  prune_cfg: PruneConfig, depth: int,
                  classes_needed: set[int]) -> _CoreResult:
    """Shared extraction path for the top-level network and subnetworks.

    Rule literals use 0-based columns of X; subnetwork callers map them back
    through their own bit maps.
    """
    data = EncodedDataset(X=X, labels=labels,
                          class_names=tuple(str(c) for c in range(class_count)))
    eps, tables, acc = auto_epsilon(net, data, cfg.required_accuracy,
                                    cfg.epsilon0, cfg.epsilon_min)
    otable = enumerate_output_table(net, tables, cfg.table_cap)
    warnings: list[str] = []

    rules_by_class: dict[int, list[DiscreteRule]] = {}
    output_rules: list[DiscreteRule] = []
    input_rules: dict[tuple[int, int], list[DiscreteRule]] = {}
    itables: dict[int, InputTable] = {}
    for c in sorted(classes_needed):
        positives = [k == c for k in otable.classes]
        orules = perfect_cover_rules(otable.combos, positives, consequent=c)
        output_rules.extend(orules)
        needed = {lit for r in orules for lit in r.antecedent}
        for m, j in sorted(needed):
            if (m, j) in input_rules:
                continue
            if m not in itables:
                try:
                    itables[m] = build_input_table(net, m, X, tables[m], cfg,
                                                   bit_map)
                except SplitRequired:
                    if not cfg.split_enabled:
                        raise
                    node_labels = _pattern_assignments(net, m, X, tables[m],
                                                       bit_map)
                    split = split_hidden_node(
                        net, m, tables[m], X, node_labels, cfg, params,
                        train_cfg, prune_cfg, bit_map, depth)
                    warnings.extend(split.warnings)
                    for jj, rl in split.rules.items():
                        input_rules[(m, jj)] = rl
            if (m, j) not in input_rules:
                input_rules[(m, j)] = input_rules_for_activation(itables[m], j)
        rules_by_class[c] = substitute(orules, input_rules, scheme, bit_map)
    return _CoreResult(rules_by_class, output_rules, warnings, eps, acc,
                       tables, otable, input_rules, itables)


def extract_rules(net: Network, data: EncodedDataset, scheme: EncodingScheme,
                  cfg: ExtractConfig, params: ObjectiveParams,
                  train_cfg: TrainConfig, prune_cfg: PruneConfig
                  ) -> ExtractionResult:
    """Run the full extraction pipeline on a trained (pruned) network."""
    classes_needed = set(range(net.o)) - {cfg.default_class}
    core = _extract_core(
        net, data.X, data.labels, net.o, scheme, list(range(net.n)), cfg,
        params, train_cfg, prune_cfg, depth=0, classes_needed=classes_needed)
    bit_rules = [r for c in sorted(core.rules_by_class)
                 for r in core.rules_by_class[c]]

    # Exact fidelity accounting on the training records: the discretized
    # network's class comes from the same pattern tables the rules were
    # built from, so any disagreement is a real extraction defect.
    discretized = _discretized_classes(net, data.X, core.tables,
                                       core.output_table, core.itables, cfg)
    rule_classes = predict_bit_rules(bit_rules, cfg.default_class, data.X)
    disagreements = int(np.sum(rule_classes != discretized))

    return ExtractionResult(
        eps=core.eps, discretized_accuracy=core.accuracy, tables=core.tables,
        output_table=core.output_table, output_rules=core.output_rules,
        input_rules=core.input_rules, bit_rules=bit_rules,
        default_class=cfg.default_class, train_rule_classes=rule_classes,
        train_discretized_classes=discretized,
        disagreements=disagreements, warnings=core.warnings,
    )


def _discretized_classes(net: Network, X: np.ndarray,
                         tables: list[ClusterTable], otable: OutputTable,
                         itables: dict[int, InputTable],
                         cfg: ExtractConfig) -> np.ndarray:
    """Class of each record under cluster-snapped activations.

    Nodes with a built input table are looked up by bit pattern so the value
    matches the rule tables bit for bit; other nodes are snapped directly.
    """
    k = X.shape[0]
    combos = np.empty((k, net.h), dtype=int)
    identity = list(range(net.n))
    for m in range(net.h):
        itable = itables.get(m)
        if itable is None:
            combos[:, m] = _pattern_assignments(net, m, X, tables[m], identity)
        else:
            _, const = _node_inputs(net, m, identity)
            for i in range(k):
                p = tuple(int(b) for b in X[i, itable.free_bits])
                rep = itable.pattern_map.get(p)
                if rep is None:
                    alpha = float(np.tanh(
                        np.dot(np.asarray(p, float), net.w[m, itable.free_bits])
                        + const))
                    rep = tables[m].assign(alpha)
                combos[i, m] = rep
    return np.array([otable.lookup[tuple(c)] for c in combos], dtype=int)


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

def extraction_report(result: ExtractionResult, net: Network,
                      class_names: tuple[str, ...]) -> str:
    lines = [
        f"epsilon: {result.eps!r}",
        f"discretized_accuracy: {result.discretized_accuracy!r}",
        f"default_class: {class_names[result.default_class]}",
        "",
        "clusters per hidden node:",
    ]
    for m, t in enumerate(result.tables):
        reps = ", ".join(f"{r:.6g}" for r in t.reps)
        counts = ", ".join(str(int(c)) for c in t.counts)
        lines.append(f"  node {m + 1}: {t.size} values [{reps}] counts [{counts}]")
    lines.append("")
    lines.append(f"activation/output table ({len(result.output_table)} rows):")
    for combo, alpha, out, cls in zip(
            result.output_table.combos, result.output_table.alphas,
            result.output_table.outputs, result.output_table.classes):
        a = " ".join(f"{x:.6g}" for x in alpha)
        s = " ".join(f"{x:.4f}" for x in out)
        lines.append(f"  {a} | {s} | {class_names[cls]}")
    lines.append("")
    lines.append("output-level rules:")
    for i, r in enumerate(result.output_rules, 1):
        ant = ", ".join(
            f"a{m + 1}={result.tables[m].reps[j]:.6g}" for m, j in r.antecedent
        ) or "always"
        lines.append(f"  O{i}: {class_names[r.consequent]} <= {ant}")
    lines.append("")
    lines.append("input-level rules per (node, value):")
    for (m, j), rl in sorted(result.input_rules.items()):
        value = f"{result.tables[m].reps[j]:.6g}"
        for r in rl:
            ant = ", ".join(f"I{bit + 1}={val}" for bit, val in r.antecedent) \
                or "always"
            lines.append(f"  node {m + 1} = {value} <= {ant}")
    lines.append("")
    lines.append("substituted bit-level rules:")
    for i, r in enumerate(result.bit_rules, 1):
        ant = ", ".join(f"I{bit + 1}={val}" for bit, val in r.antecedent) \
            or "always"
        lines.append(f"  B{i}: {class_names[r.consequent]} <= {ant}")
    lines.append("")
    lines.append(f"training records: {len(result.train_rule_classes)}")
    lines.append(f"rule/discretized disagreements: {result.disagreements}")
    for w in result.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"
