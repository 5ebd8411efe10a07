"""Command pipelines: each takes an :class:`ExperimentConfig` and returns a finalized :class:`Report`.

``summary["failures"]`` counts violated invariants; the CLI turns a
nonzero count into exit code 2.
"""
from __future__ import annotations

import dataclasses
import itertools
import logging
from typing import Callable, Dict, List, Optional, Tuple

from tqdm import tqdm

from limitgroups.models.report import ExperimentConfig, Report
from limitgroups.services.baumslag import (
    BaumslagInstance,
    GeneralBaumslagInstance,
    basic_to_general,
    certificate_checks,
    certify_general,
    eval_basic,
    eval_general,
    instance_from_dict,
    verify_certificate,
)
from limitgroups.services.construct import (
    AMALGAM,
    HNN,
    double_of_free,
    double_onset_certified,
    enumerate_reduced,
    f2xf2_scan,
    hnn_of_free,
    spec_from_dict,
    twist_then_fold,
)
from limitgroups.services.surface import (
    ball,
    dehn_is_trivial,
    f_n,
    fold,
    make_presentation,
    onset_certified,
    onset_empirical,
    rho_power_symbolic,
    twist_audit,
)
from limitgroups.services.targets import (
    Mat2Int,
    SL2ModPk,
    closure,
    cyclic_closure,
    free_hom,
    h_k_family,
    injectivity_on_ball,
    search_generating_pair,
    shortest_relation,
)
from limitgroups.services.words import FreeWord, apply_hom, format_word, generator, parse_word
from limitgroups.utils.helpers import load_json_file, load_matrices, parse_matrix
from limitgroups.utils.rng import make_rng, random_words, signed_exponents

logger = logging.getLogger("LIMITGROUPS")


def _bar(config: ExperimentConfig, items, desc: str):
    return tqdm(items, disable=not config.progress, desc=desc)


# ---------------------------------------------------------------------------
# baumslag
# ---------------------------------------------------------------------------


def _load_instance(config: ExperimentConfig) -> Tuple[GeneralBaumslagInstance, Callable, int]:
    data = load_json_file(config.params["instance"])
    if config.params.get("relaxed"):
        data = {**data, "relaxed": True}
    inst = instance_from_dict(data)
    if isinstance(inst, BaumslagInstance):
        return basic_to_general(inst), (lambda t: eval_basic(inst, t)), inst.n + 1
    return inst, (lambda t: eval_general(inst, t)), inst.z_slot_count


def run_baumslag_certify(config: ExperimentConfig) -> Report:
    general, evaluate, slots = _load_instance(config)
    samples = int(config.params.get("samples", 1000))
    spread = int(config.params.get("spread", 20))
    cert = certify_general(general)
    checks = certificate_checks(cert, general)
    verified = all(checks.values())
    mutated = dataclasses.replace(cert, N=cert.N - 1)
    mutation_rejected = not verify_certificate(mutated, general)

    rng = make_rng(config.seed)
    counterexamples: List[List[int]] = []
    for _ in _bar(config, range(samples), "sampling"):
        t = signed_exponents(rng, slots, cert.N, cert.N + spread)
        if evaluate(t).is_trivial:
            counterexamples.append(t)
    report = Report(config)
    report.add(
        {
            "certificate": cert.as_dict(general),
            "verified": verified,
            "mutation_rejected": mutation_rejected,
            "samples": samples,
            "counterexamples": counterexamples[:10],
        }
    )
    failures = int(not verified) + int(not mutation_rejected) + len(counterexamples)
    report.finalize(N=cert.N, verified=verified)
    report.summary["failures"] = failures
    return report


def run_baumslag_sweep(config: ExperimentConfig) -> Report:
    general, evaluate, slots = _load_instance(config)
    window = int(config.params.get("window", 3))
    cap = int(config.params.get("cap", 8))
    cert = certify_general(general)
    report = Report(config)
    empirical: Optional[int] = None
    for low in _bar(config, range(1, cap + 1), "sweep"):
        values = [s * v for v in range(low, low + window + 1) for s in (1, -1)]
        tuples = list(itertools.product(values, repeat=slots))
        trivial = sum(1 for t in tuples if evaluate(t).is_trivial)
        if trivial == 0 and empirical is None:
            empirical = low
        report.add({"low": low, "window": window, "tuples": len(tuples), "trivial": trivial})
    consistent = (empirical is not None and empirical <= cert.N) if cap >= cert.N else True
    report.finalize(sort_key=lambda r: r["low"], empirical_min=empirical, certified_N=cert.N, consistent=consistent)
    report.summary["failures"] = int(not consistent)
    return report


# ---------------------------------------------------------------------------
# surface
# ---------------------------------------------------------------------------


def run_surface_onset(config: ExperimentConfig) -> Report:
    r = int(config.params.get("r", 1))
    radius = int(config.params.get("radius", 2))
    window = int(config.params.get("window", 16))
    certified = bool(config.params.get("certified", False))
    pres = make_presentation(r)
    elements = ball(radius, r)
    logger.info("surface onset: r=%s, %s ball elements", r, len(elements))
    report = Report(config)
    failures = 0
    for el in _bar(config, elements, "onsets"):
        row: Dict = {"word": pres.format(el.canonical), "empirical_onset": onset_empirical(el, window)}
        if certified:
            c = onset_certified(el)
            clean = all(not f_n(el, n).is_trivial for n in range(c, c + window + 1))
            ok = clean and row["empirical_onset"] <= c
            failures += int(not ok)
            row.update({"certified_onset": c, "checked_range": [c, c + window], "range_clean": ok})
        report.add(row)
    report.finalize()
    report.summary["failures"] = failures
    return report


def run_surface_twist_audit(config: ExperimentConfig) -> Report:
    r = int(config.params.get("r", 1))
    samples = int(config.params.get("samples", 200))
    length = int(config.params.get("length", 8))
    pres = make_presentation(r)
    rng = make_rng(config.seed)
    words = random_words(rng, pres.rank, samples, length)
    counts = twist_audit(pres, words, progress=config.progress)

    hom_failures = 0
    for u, v in zip(words, words[1:]):
        for n in range(4):
            if f_n(u * v, n, pres) != f_n(u, n, pres) * f_n(v, n, pres):
                hom_failures += 1
    gens = [generator(i, pres.rank) for i in range(1, pres.rank + 1)]
    rho_failures = sum(
        1 for g in gens for n in range(9) if rho_power_symbolic(g, n, pres) != f_n(g, n, pres)
    )
    relator_failures = int(not fold(pres.relator, pres).is_trivial) + sum(
        1 for n in range(9) if not rho_power_symbolic(pres.relator, n, pres).is_trivial
    )
    cases = len(words) + len(gens)
    report = Report(config)
    for name, value in counts.items():
        report.add({"check": name, "cases": 2 if name == "relator" else cases, "failures": value})
    report.add({"check": "f_n_homomorphism", "cases": 4 * max(len(words) - 1, 0), "failures": hom_failures})
    report.add({"check": "rho_equals_f_n", "cases": 9 * len(gens), "failures": rho_failures})
    report.add({"check": "relator_killed", "cases": 10, "failures": relator_failures})
    report.finalize(sort_key=lambda row: row["check"], relator_trivial=dehn_is_trivial(pres.relator, pres))
    report.summary["failures"] = sum(row["failures"] for row in report.rows)
    return report


# ---------------------------------------------------------------------------
# double / residual
# ---------------------------------------------------------------------------


def _double_from_params(config: ExperimentConfig):
    text = config.params.get("c") or "[x1,x2]"
    rank = config.params.get("rank")
    c = parse_word(text, int(rank) if rank else None)
    kind = config.params.get("kind") or AMALGAM
    builder = hnn_of_free if kind == HNN else double_of_free
    return builder(c.rank, c)


def run_double_scan(config: ExperimentConfig) -> Report:
    spec = _double_from_params(config)
    syllables = int(config.params.get("syllables", 3))
    length = int(config.params.get("length", 4))
    window = int(config.params.get("window", 16))
    forms = enumerate_reduced(spec, syllables, length)
    logger.info("double scan: %s reduced forms", len(forms))
    images: Dict[int, Dict[int, FreeWord]] = {}

    def image(w: FreeWord, m: int) -> FreeWord:
        if m not in images:
            images[m] = twist_then_fold(spec, m)
        return apply_hom(images[m], w, spec.rank)

    report = Report(config)
    failures = 0
    for form in _bar(config, forms, "forms"):
        w = form.word(spec)
        onset = double_onset_certified(spec, w).onset
        clean = all(not image(w, m).is_trivial for m in range(onset, onset + window + 1))
        failures += int(not clean)
        report.add(
            {
                "form": spec.presentation.format(w),
                "syllables": len(form.syllables),
                "certified_onset": onset,
                "checked_range": [onset, onset + window],
                "range_clean": clean,
            }
        )
    first_copy = all(
        images_m[i] == spec.fold_images[i]
        for images_m in (twist_then_fold(spec, m) for m in range(window + 1))
        for i in range(1, spec.rank + 1)
    )
    report.finalize(double=spec.as_dict(), first_copy_fixed=first_copy)
    report.summary["failures"] = failures + int(not first_copy)
    return report


def run_residual_f2xf2(config: ExperimentConfig) -> Report:
    w = parse_word(config.params.get("w") or "x1", 2)
    w_prime = parse_word(config.params.get("w_prime") or "x2", 2)
    cap = int(config.params.get("cap", 2))
    scan = f2xf2_scan(w, w_prime, cap, progress=config.progress)
    report = Report(config)
    report.add({"w": format_word(w), "w_prime": format_word(w_prime), **scan.as_dict()})
    report.finalize(nonseparable=scan.nonseparable)
    report.summary["failures"] = scan.separating + int(not scan.collapse_consistent)
    return report


# ---------------------------------------------------------------------------
# padic
# ---------------------------------------------------------------------------


def _group(config: ExperimentConfig) -> SL2ModPk:
    return SL2ModPk(int(config.params.get("p", 5)), int(config.params.get("k", 1)))


def run_padic_hk(config: ExperimentConfig) -> Report:
    group = _group(config)
    path = config.params.get("double")
    spec = spec_from_dict(load_json_file(path)) if path else double_of_free(2, parse_word("[x1,x2]", 2))
    syllables = int(config.params.get("syllables", 2))
    length = int(config.params.get("length", 4))
    forms = [f.word(spec) for f in enumerate_reduced(spec, syllables, length)]
    rng = make_rng(config.seed + 1)
    elements = group.elements()
    extra = [elements[int(i)] for i in rng.integers(0, len(elements), size=max(spec.rank - 2, 0))]

    def phi_for(a, b):
        return free_hom(spec.rank, [a, b] + extra, group)

    def accept(a, b) -> bool:
        phi = phi_for(a, b)
        return any(
            not injectivity_on_ball(h_k_family(spec, phi, k), forms)
            for k in cyclic_closure(phi.evaluate(spec.edge), group)
        )

    a, b = search_generating_pair(group, config.seed, accept)
    phi = phi_for(a, b)
    ks = cyclic_closure(phi.evaluate(spec.edge), group)
    report = Report(config)
    not_surjective = 0
    empty_kill = 0
    for j, k in enumerate(_bar(config, ks, "h_k")):
        hom = h_k_family(spec, phi, k)
        surjective = len(hom.image_closure()) == group.order
        killed = injectivity_on_ball(hom, forms)
        not_surjective += int(not surjective)
        empty_kill += int(not killed)
        report.add(
            {
                "power": j,
                "k": list(k.entries),
                "relators_ok": True,
                "surjective": surjective,
                "killed": len(killed),
                "killed_examples": [spec.presentation.format(w) for w in killed[:3]],
            }
        )
    report.finalize(
        sort_key=lambda row: row["power"],
        group=group.name,
        pair=[list(a.entries), list(b.entries)],
        closure_size=len(ks),
        forms=len(forms),
        empty_kill_lists=empty_kill,
    )
    report.summary["failures"] = not_surjective + int(empty_kill == 0)
    return report


def run_padic_surject(config: ExperimentConfig) -> Report:
    group = _group(config)
    path = config.params.get("gens")
    searched = not path
    if path:
        gens = [group.matrix(*row) for row in load_matrices(path)]
    else:
        gens = list(search_generating_pair(group, config.seed))
    size = len(closure(gens, group))
    surjective = size == group.order
    report = Report(config)
    report.add({"gens": [list(g.entries) for g in gens], "closure": size, "order": group.order, "surjective": surjective})
    report.finalize(group=group.name, surjective=surjective)
    report.summary["failures"] = int(searched and not surjective)
    return report


def run_padic_freepair(config: ExperimentConfig) -> Report:
    a = Mat2Int(*parse_matrix(config.params.get("a") or "1 2 0 1"))
    b = Mat2Int(*parse_matrix(config.params.get("b") or "1 0 2 1"))
    length = int(config.params.get("length", 8))
    shortest = shortest_relation(a, b, length)
    report = Report(config)
    for L in range(1, length + 1):
        report.add({"length": L, "free": shortest is None or shortest > L})
    report.finalize(
        sort_key=lambda row: row["length"],
        a=list(a.entries),
        b=list(b.entries),
        free=shortest is None,
        shortest_relation=shortest,
    )
    return report

