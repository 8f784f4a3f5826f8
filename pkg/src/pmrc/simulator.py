"""Block-granular storage-cluster simulator with fault injection.

The cluster holds one encoded share set per block and retains the ground
truth, so every repair/reconstruction outcome is checked: the codes under
test never see the truth, the harness always does. Adversaries act at block
granularity: an erased helper drops its whole response, a corrupt helper
replaces all of its response symbols with seeded-random values.

Helper/provider selection is deterministic (lowest alive ids) by default; an
event may ask for a seeded permutation instead to exercise the "any Delta
(kappa) nodes" guarantee.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Sequence

from .decoding import Response
from .errors import DecodeFailure, InfeasibleError, ParameterError
from .field import Fq, default_modulus
from .msr import NodeShare, msr_encode, msr_fill_message, msr_helper_symbol, msr_repair, msr_reconstruct
from .mbr import mbr_encode, mbr_fill_message, mbr_helper_symbol, mbr_repair, mbr_reconstruct
from .params import (
    CodeMode,
    EncodingMatrix,
    SystemParams,
    build_encoding,
    mbr_params,
    msr_params,
    resilience_feasible,
)

SUCCESS = "success"
DETECTED = "detected-failure"
MISMATCH = "mismatch"


@dataclass(frozen=True)
class AdversaryPlan:
    """Whole-response faults for one event: erase drops a helper's response,
    corrupt replaces it with seeded-random symbols."""

    erase: frozenset[int] = frozenset()
    corrupt: frozenset[int] = frozenset()
    seed: int = 0

    def __post_init__(self):
        overlap = self.erase & self.corrupt
        if overlap:
            raise ParameterError(f"nodes {sorted(overlap)} both erased and corrupted")


@dataclass(frozen=True)
class EventReport:
    kind: str
    s: int
    t: int
    connectivity: int
    downloaded: int
    outcome: str
    node: int | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "s": self.s,
            "t": self.t,
            "connectivity": self.connectivity,
            "downloaded": self.downloaded,
            "outcome": self.outcome,
        }
        if self.node is not None:
            out["node"] = self.node
        if self.detail:
            out["detail"] = self.detail
        return out


def _random_symbols(rng: random.Random, count: int, q: int) -> tuple[int, ...]:
    return tuple(rng.randrange(q) for _ in range(count))


class ClusterState:
    """n node slots, each alive with per-block shares or failed."""

    def __init__(self, enc: EncodingMatrix, payloads: Sequence[Sequence[int]]):
        self.enc = enc
        self.params = enc.params
        self.field = enc.field
        self.blocks = list(range(len(payloads)))
        self.payloads = [tuple(p) for p in payloads]
        self._shares: dict[int, list[tuple[int, ...]] | None] = {
            i: [] for i in range(1, self.params.n + 1)
        }
        for payload in self.payloads:
            for share in self._encode_block(payload):
                self._shares[share.node_id].append(share.symbols)

    def _encode_block(self, payload: Sequence[int]) -> list[NodeShare]:
        if self.params.mode is CodeMode.MSR:
            return msr_encode(msr_fill_message(payload, self.params, self.field), self.enc)
        return mbr_encode(mbr_fill_message(payload, self.params, self.field), self.enc)

    def _truth_share(self, node: int, block: int) -> tuple[int, ...]:
        shares = self._encode_block(self.payloads[block])
        return shares[node - 1].symbols

    def alive(self) -> list[int]:
        return sorted(i for i, s in self._shares.items() if s is not None)

    def is_alive(self, node: int) -> bool:
        self.enc.check_node(node)
        return self._shares[node] is not None

    def share(self, node: int, block: int) -> NodeShare:
        if not self.is_alive(node):
            raise ParameterError(f"node {node} is failed")
        return NodeShare(node, self._shares[node][block])

    def fail(self, node: int) -> None:
        """Discard a live node's shares (it is replaced by an empty node)."""
        if not self.is_alive(node):
            raise ParameterError(f"node {node} already failed")
        self._shares[node] = None

    def _select(
        self, candidates: list[int], count: int, rng: random.Random | None
    ) -> list[int]:
        if rng is None:
            return candidates[:count]
        picked = list(candidates)
        rng.shuffle(picked)
        return sorted(picked[:count])

    def repair(
        self,
        failed: int,
        s: int = 0,
        t: int = 0,
        adversary: AdversaryPlan | None = None,
        permute_rng: random.Random | None = None,
    ) -> EventReport:
        """Regenerate a failed node from Delta = d+s+2t helper responses and
        reinstate the result; the installed share is checked against ground
        truth so a beyond-budget adversary can never corrupt silently."""
        params = self.params
        if self.is_alive(failed):
            raise ParameterError(f"node {failed} is alive; fail it first")
        if not resilience_feasible(params, s, t):
            raise InfeasibleError(f"(s={s}, t={t}) infeasible for n={params.n}")
        delta = params.d + s + 2 * t
        helpers = [i for i in self.alive() if i != failed]
        if len(helpers) < delta:
            raise InfeasibleError(
                f"only {len(helpers)} alive helpers, repair needs {delta}"
            )
        chosen = self._select(helpers, delta, permute_rng)
        plan = adversary or AdversaryPlan()
        rng = random.Random(f"corrupt:{plan.seed}")
        helper_fn = (
            msr_helper_symbol if params.mode is CodeMode.MSR else mbr_helper_symbol
        )
        repair_fn = msr_repair if params.mode is CodeMode.MSR else mbr_repair

        rebuilt: list[tuple[int, ...]] = []
        outcome = SUCCESS
        detail = ""
        for block in self.blocks:
            responses = []
            for h in chosen:
                if h in plan.erase:
                    responses.append(Response(h, None))
                    continue
                symbols = helper_fn(self.share(h, block), failed, self.enc)
                if h in plan.corrupt:
                    symbols = _random_symbols(rng, params.beta, self.field.q)
                responses.append(Response(h, symbols))
            try:
                rebuilt.append(repair_fn(responses, failed, self.enc, s, t).symbols)
            except DecodeFailure as e:
                outcome, detail = DETECTED, str(e)
                break
        if outcome == SUCCESS:
            for block in self.blocks:
                if rebuilt[block] != self._truth_share(failed, block):
                    outcome = MISMATCH
                    detail = f"block {block} share differs from ground truth"
                    break
            self._shares[failed] = rebuilt
        return EventReport(
            kind="repair",
            s=s,
            t=t,
            connectivity=delta,
            downloaded=delta * params.beta * len(self.blocks),
            outcome=outcome,
            node=failed,
            detail=detail,
        )

    def reconstruct(
        self,
        s: int = 0,
        t: int = 0,
        adversary: AdversaryPlan | None = None,
        permute_rng: random.Random | None = None,
    ) -> tuple[EventReport, list[tuple[int, ...]] | None]:
        """Data-collector read from kappa = k+s+2t providers; the recovered
        payload is compared against ground truth."""
        params = self.params
        kappa = params.k + s + 2 * t
        if kappa > params.n:
            raise InfeasibleError(f"(s={s}, t={t}) needs k+s+2t <= n")
        providers = self.alive()
        if len(providers) < kappa:
            raise InfeasibleError(
                f"only {len(providers)} alive nodes, reconstruction needs {kappa}"
            )
        chosen = self._select(providers, kappa, permute_rng)
        plan = adversary or AdversaryPlan()
        rng = random.Random(f"corrupt:{plan.seed}")
        rec_fn = msr_reconstruct if params.mode is CodeMode.MSR else mbr_reconstruct

        recovered: list[tuple[int, ...]] = []
        outcome = SUCCESS
        detail = ""
        for block in self.blocks:
            responses = []
            for i in chosen:
                if i in plan.erase:
                    responses.append(Response(i, None))
                    continue
                symbols = self.share(i, block).symbols
                if i in plan.corrupt:
                    symbols = _random_symbols(rng, params.alpha, self.field.q)
                responses.append(Response(i, symbols))
            try:
                recovered.append(rec_fn(responses, self.enc, s, t))
            except DecodeFailure as e:
                outcome, detail = DETECTED, str(e)
                break
        if outcome == SUCCESS and recovered != self.payloads:
            outcome = MISMATCH
            detail = "recovered payload differs from ground truth"
        report = EventReport(
            kind="reconstruct",
            s=s,
            t=t,
            connectivity=kappa,
            downloaded=kappa * params.alpha * len(self.blocks),
            outcome=outcome,
            detail=detail,
        )
        return report, (recovered if outcome != DETECTED else None)

    def verify_consistent(self) -> bool:
        """Debug sweep: every alive share matches a fresh encode of the
        retained payloads."""
        for node in self.alive():
            for block in self.blocks:
                if self._shares[node][block] != self._truth_share(node, block):
                    return False
        return True


def adversary_patterns(nodes: Sequence[int], s: int, t: int, seed: int = 0):
    """Exhaustive-adversary mode: every whole-response fault pattern within
    the (s, t) budget over the given nodes, values still seeded-random."""
    from itertools import combinations

    nodes = sorted(nodes)
    for n_erase in range(s + 1):
        for erase in combinations(nodes, n_erase):
            rest = [x for x in nodes if x not in erase]
            for n_corrupt in range(t + 1):
                for corrupt in combinations(rest, n_corrupt):
                    yield AdversaryPlan(
                        erase=frozenset(erase), corrupt=frozenset(corrupt), seed=seed
                    )


def exhaustive_resilience_check(
    enc: EncodingMatrix, blocks: int = 1, seeds: Sequence[int] = (0,)
) -> tuple[int, list[EventReport]]:
    """Sweep every feasible (s, t), failed node, and adversary pattern on a
    fresh cluster; returns (event count, non-success reports)."""
    params = enc.params
    rng = random.Random("exhaustive-payload")
    payloads = [
        _random_symbols(rng, params.message_symbols, enc.field.q)
        for _ in range(blocks)
    ]
    events = 0
    bad: list[EventReport] = []
    pairs = [
        (s, t)
        for s in range(params.n)
        for t in range(params.n)
        if resilience_feasible(params, s, t)
    ]
    # a successful repair restores the exact share, so one cluster serves the
    # whole sweep; it is only rebuilt after a (budget-violating) failure
    cluster = ClusterState(enc, payloads)
    for s, t in pairs:
        delta = params.d + s + 2 * t
        kappa = params.k + s + 2 * t
        for failed in range(1, params.n + 1):
            helpers = [i for i in range(1, params.n + 1) if i != failed][:delta]
            for plan_seed in seeds:
                for plan in adversary_patterns(helpers, s, t, seed=plan_seed):
                    cluster.fail(failed)
                    report = cluster.repair(failed, s, t, plan)
                    events += 1
                    if report.outcome != SUCCESS:
                        bad.append(report)
                        cluster = ClusterState(enc, payloads)
        providers = list(range(1, kappa + 1))
        for plan_seed in seeds:
            for plan in adversary_patterns(providers, s, t, seed=plan_seed):
                report, _ = cluster.reconstruct(s, t, plan)
                events += 1
                if report.outcome != SUCCESS:
                    bad.append(report)
    return events, bad


def params_from_scenario(cfg: dict) -> SystemParams:
    try:
        mode = CodeMode(cfg["mode"])
        k = int(cfg["k"])
        n = int(cfg["n"])
        beta = int(cfg.get("beta", 1))
    except (KeyError, ValueError) as e:
        raise ParameterError(f"scenario: bad or missing code parameters ({e})")
    if mode is CodeMode.MSR:
        return msr_params(k=k, n=n, beta=beta)
    if "d" not in cfg:
        raise ParameterError("scenario: MBR needs d")
    return mbr_params(k=k, d=int(cfg["d"]), n=n, beta=beta)


def load_scenario(path) -> dict:
    with open(path, "r", encoding="utf-8") as fp:
        cfg = json.load(fp)
    if not isinstance(cfg, dict) or "events" not in cfg:
        raise ParameterError("scenario: top-level object with an 'events' list required")
    return cfg


def run_scenario(cfg: dict) -> tuple[list[EventReport], dict]:
    """Deterministic replay of a scenario dict; returns per-event reports and
    aggregate statistics."""
    params = params_from_scenario(cfg)
    q = int(cfg.get("q", default_modulus(params.n)))
    enc = build_encoding(params, Fq(q))
    seed = int(cfg.get("seed", 0))
    nblocks = int(cfg.get("blocks", 1))
    rng = random.Random(f"payload:{seed}")
    payloads = [
        _random_symbols(rng, params.message_symbols, q) for _ in range(nblocks)
    ]
    cluster = ClusterState(enc, payloads)

    reports: list[EventReport] = []
    for idx, ev in enumerate(cfg["events"]):
        if not isinstance(ev, dict) or "op" not in ev:
            raise ParameterError(f"scenario: event {idx} needs an 'op'")
        op = ev["op"]
        s, t = int(ev.get("s", 0)), int(ev.get("t", 0))
        plan = AdversaryPlan(
            erase=frozenset(ev.get("erase", [])),
            corrupt=frozenset(ev.get("corrupt", [])),
            seed=seed * 100003 + idx,
        )
        permute = (
            random.Random(f"permute:{seed}:{idx}") if ev.get("permute") else None
        )
        if op == "fail":
            cluster.fail(int(ev["node"]))
            reports.append(
                EventReport(
                    kind="fail", s=0, t=0, connectivity=0, downloaded=0,
                    outcome=SUCCESS, node=int(ev["node"]),
                )
            )
        elif op == "repair":
            reports.append(
                cluster.repair(int(ev["node"]), s, t, plan, permute)
            )
        elif op == "reconstruct":
            report, _ = cluster.reconstruct(s, t, plan, permute)
            reports.append(report)
        else:
            raise ParameterError(f"scenario: unknown op {op!r} in event {idx}")

    successes = sum(r.outcome == SUCCESS for r in reports)
    stats = {
        "events": len(reports),
        "successes": successes,
        "success_rate": successes / len(reports) if reports else 1.0,
        "downloaded_total": sum(r.downloaded for r in reports),
    }
    return reports, stats
