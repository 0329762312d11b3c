"""Named checks producing report records, and the acceptance suite."""

from __future__ import annotations

import signal
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable

from .algebra import TABLE_TRIALS, Sign, build_herm, verify_product_formulas
from .deltader import (DEFAULT_DELTAS, compare_known_derivations, composition_check, delta_der_space,
                       delta_scan, gl_cross_checks, half_der_elements, half_der_via_elements,
                       lemma_xdm_space)
from .errors import OctlabError, ResourceBoundExceeded
from .exactnum import QQ, Field, scalar_to_str
from .forms import (assoc_form_space, form_match, gram_rank, killing_restriction_check,
                    trace_form_block_table, trace_form_gram)
from .octonion import Octonion, check_table, oct_norm, oct_norm_polar, oct_trace
from .structure import (DEFAULT_PRIMES, Identity, Verdict, centroid, certify_simple, identity_check,
                        lemma_kernels)

CHECK_NAMES = ("dims", "products", "simplicity", "centroid", "lemmas", "identities", "derivations",
               "scan", "forms", "killing")

PASS, FAIL, INFO, TIMEOUT = "pass", "fail", "info", "timeout"


@dataclass
class Record:
    id: str
    anchor: str
    expected: object
    computed: object
    verdict: str
    certification: str = "Exact"
    ms: int = 0

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class CheckConfig:
    n: int = 2
    signs: tuple = (Sign.PLUS, Sign.MINUS)
    field: Field = QQ
    deltas: tuple = DEFAULT_DELTAS
    primes: tuple = DEFAULT_PRIMES
    seed: int = 0
    trials: int = 20
    product_trials: int = 500
    law_trials: int = 1000
    time_box: float = 600.0
    extra: dict = dc_field(default_factory=dict)


class TimeBox(Exception):
    pass


@contextmanager
def time_box(seconds: float):
    """Raise TimeBox if the body runs longer than ``seconds`` (main thread, POSIX)."""
    if seconds is None or not hasattr(signal, "SIGALRM"):
        yield
        return

    def handler(signum, frame):
        raise TimeBox()

    old = signal.signal(signal.SIGALRM, handler)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def _plain(x):
    if isinstance(x, Fraction):
        return scalar_to_str(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if hasattr(x, "v") and hasattr(x, "p"):
        return int(x.v)
    return x


def timed(rid: str, anchor: str, expected, fn: Callable, judge: Callable | None = None,
          certification: str = "Exact", box: float | None = None) -> Record:
    """Run ``fn`` and judge its value against ``expected`` (equality unless ``judge`` is given)."""
    start = time.perf_counter()
    try:
        if box is not None:
            with time_box(box):
                computed = fn()
        else:
            computed = fn()
    except TimeBox:
        ms = int((time.perf_counter() - start) * 1000)
        return Record(rid, anchor, _plain(expected), None, TIMEOUT, certification, ms)
    except ResourceBoundExceeded:
        raise
    except OctlabError as exc:
        ms = int((time.perf_counter() - start) * 1000)
        return Record(rid, anchor, _plain(expected), {"error": type(exc).__name__, "message": str(exc)},
                      FAIL, certification, ms)
    ms = int((time.perf_counter() - start) * 1000)
    if judge is not None:
        verdict = judge(computed)
    elif expected is None:
        verdict = INFO
    else:
        verdict = PASS if computed == expected else FAIL
    if isinstance(verdict, bool):
        verdict = PASS if verdict else FAIL
    return Record(rid, anchor, _plain(expected), _plain(computed), verdict, certification, ms)


def _tag(sign: Sign) -> str:
    return sign.value


def herm_dim(n: int, sign: Sign) -> int:
    return 4 * n * n - 3 * n if sign is Sign.PLUS else 4 * n * n + 3 * n


def expected_der_dim(n: int, sign: Sign):
    """Stated dimension of the derivation algebra, None where no statement exists."""
    if sign is Sign.MINUS:
        return 14 + n * (n - 1) // 2
    if n == 3:
        return 52
    if n >= 4:
        return 14 + n * (n - 1) // 2
    return None


# --------------------------------------------------------------------------
# individual checks, each for a single order n


def check_dims(cfg: CheckConfig) -> list[Record]:
    return [timed(f"dims.{_tag(s)}.n{cfg.n}", "claim:dimension-formulas", herm_dim(cfg.n, s),
                  lambda s=s: build_herm(cfg.n, s, cfg.field).dim) for s in cfg.signs]


def octonion_laws(field: Field, trials: int, seed: int) -> dict:
    """Random-sample checks of the octonion laws; returns failure counts per law."""
    import random
    rng = random.Random(seed)
    fails = {k: 0 for k in ("quadratic", "polar", "conjugation", "alternative", "norm")}
    one = Octonion.unit(0, field)
    for _ in range(trials):
        a, b = Octonion.random(rng, field), Octonion.random(rng, field)
        fails["quadratic"] += bool(a * a - a.scale(oct_trace(a)) + one.scale(oct_norm(a)))
        ia, ib = Octonion.random(rng, field, True), Octonion.random(rng, field, True)
        fails["polar"] += (ia * ib + ib * ia) != one.scale(oct_norm_polar(ia, ib))
        fails["conjugation"] += (a * b).conj() != b.conj() * a.conj()
        fails["alternative"] += ((a * a) * b != a * (a * b)) or ((a * b) * b != a * (b * b))
        fails["norm"] += oct_norm(a * b) != oct_norm(a) * oct_norm(b)
    return fails


def check_octonion_laws(cfg: CheckConfig) -> list[Record]:
    out = [timed(f"octonion.table.{cfg.field.spec.descriptor()}", "claim:octonion-basis-rules", [],
                 lambda: check_table(cfg.field))]
    zero = {k: 0 for k in ("quadratic", "polar", "conjugation", "alternative", "norm")}
    out.append(timed(f"octonion.laws.{cfg.field.spec.descriptor()}", "claim:octonion-identities", zero,
                     lambda: octonion_laws(cfg.field, cfg.law_trials, cfg.seed)))
    return out


def check_products(cfg: CheckConfig) -> list[Record]:
    if cfg.n < 2:
        return [Record(f"products.n{cfg.n}", "claim:block-product-rules", None,
                       "no off-diagonal blocks for n = 1", INFO)]
    res = {}

    def run():
        res.update(verify_product_formulas(cfg.n, cfg.field, cfg.product_trials, cfg.seed))
        return res["passed"]

    expected = {k: cfg.product_trials for k in (
        "jordan_skew_corrected", "jordan_skew_same_imag", "bracket_sym", "bracket_sym_same_imag",
        "jordan_real_real", "jordan_real_skew", "bracket_real_real", "bracket_real_sym")}
    expected.update({k: min(cfg.product_trials, TABLE_TRIALS) for k in ("table_plus", "table_minus")})
    rec = timed(f"products.n{cfg.n}", "claim:block-product-rules", expected, run)
    out = [rec]
    if res:
        u = res["unhalved_jordan_formula"]
        out.append(Record(f"products.jordan-skew-factor.n{cfg.n}", "claim:block-product-rules",
                          None, {"stated_rule_equals_twice_jordan_product": u["equals_twice_jordan_product"],
                                 "stated_rule_equals_jordan_product": u["matches_jordan_product"],
                                 "nonzero_products": u["nonzero_trials"],
                                 "trials": cfg.product_trials, "note": u["note"]}, INFO))
    return out


def check_simplicity(cfg: CheckConfig) -> list[Record]:
    out = []
    for s in cfg.signs:
        def run(s=s):
            cert = certify_simple(build_herm(cfg.n, s, cfg.field), cfg.trials, cfg.primes, cfg.seed)
            return {"verdict": cert.verdict.value, "method": cert.method.value, **cert.details}

        def judge(c):
            if cfg.field.is_rational:
                good = [p for p, v in c["modular"].items() if v == Verdict.SIMPLE_CERTIFIED.value]
                return c["verdict"] == Verdict.SIMPLE_EVIDENCE.value and len(good) >= 3
            return c["verdict"] == Verdict.SIMPLE_CERTIFIED.value

        exp = "SimpleEvidence" if cfg.field.is_rational else "SimpleCertified"
        cert = "Evidence+ModularCertificates" if cfg.field.is_rational else "IrreducibilityTest"
        out.append(timed(f"simplicity.{_tag(s)}.n{cfg.n}", "claim:simplicity", exp, run, judge, cert))
    return out


def check_centroid(cfg: CheckConfig, box: float | None = None) -> list[Record]:
    return [timed(f"centroid.{_tag(s)}.n{cfg.n}", "claim:central-simplicity", 1,
                  lambda s=s: centroid(build_herm(cfg.n, s, cfg.field)).dim, box=box,
                  certification="ExactVerified") for s in cfg.signs]


def check_lemmas(cfg: CheckConfig) -> list[Record]:
    n = cfg.n
    out = []
    if n >= 2:
        out.append(timed(f"lemmas.kernels.n{n}", "claim:kernel-lemmas", True,
                         lambda: lemma_kernels(n, cfg.field), lambda r: r["passed"]))
        for d in (Fraction(1, 2), Fraction(-1)):
            out.append(timed(f"lemmas.commutator-image.n{n}.delta={scalar_to_str(d)}",
                             "claim:commutator-image-lemma", True,
                             lambda d=d: {k: v for k, v in lemma_xdm_space(n, d, cfg.field).items()
                                          if k != "space"},
                             lambda r: r["image_in_E"], "ExactVerified"))
        out.append(timed(f"lemmas.gl.n{n}", "claim:gl-delta-derivations", True,
                         lambda: gl_cross_checks(n, cfg.field), lambda r: r["passed"], "ExactVerified"))
    if Sign.PLUS in cfg.signs:
        out.append(timed(f"lemmas.half-elements.plus.n{n}", "claim:unit-half-derivations", 1,
                         lambda: half_der_elements(build_herm(n, Sign.PLUS, cfg.field)).dim,
                         certification="ExactVerified"))
    return out


def check_identities(cfg: CheckConfig) -> list[Record]:
    n = cfg.n
    out = []
    if Sign.PLUS in cfg.signs:
        holds = n <= 3
        anchor = "claim:jordan-up-to-3" if holds else "claim:not-jordan-from-4"
        out.append(timed(f"identities.jordan.plus.n{n}", anchor, holds,
                         lambda: identity_check(build_herm(n, Sign.PLUS, cfg.field), Identity.JORDAN).to_json(),
                         lambda r: r["holds"] == holds))
    if Sign.MINUS in cfg.signs and n == 1:
        alg = build_herm(1, Sign.MINUS, cfg.field)
        out.append(timed("identities.malcev.minus.n1", "claim:malcev-n1", True,
                         lambda: identity_check(alg, Identity.MALCEV).to_json(), lambda r: r["holds"]))
        out.append(timed("identities.jacobi.minus.n1", "derived", False,
                         lambda: identity_check(alg, Identity.JACOBI).to_json(), lambda r: not r["holds"]))
    return out


def check_derivations(cfg: CheckConfig) -> list[Record]:
    n = cfg.n
    out = []
    for s in cfg.signs:
        exp = expected_der_dim(n, s)
        anchor = "claim:derivation-algebra-dims" if exp is not None else "derived"
        out.append(timed(f"derivations.dim.{_tag(s)}.n{n}", anchor, exp,
                         lambda s=s: delta_der_space(build_herm(n, s, cfg.field), 1).dim,
                         certification="ExactVerified"))
        if s is Sign.MINUS or n >= 3:
            equal = s is Sign.MINUS or n >= 4
            out.append(timed(f"derivations.known-span.{_tag(s)}.n{n}", "claim:explicit-derivations",
                             {"equal": equal, "known_dim": 14 + n * (n - 1) // 2},
                             lambda s=s: compare_known_derivations(n, s, cfg.field),
                             lambda r, equal=equal: (r["contained"] and r["equal"] == equal
                                                     and r["known_dim"] == r["expected_known_dim"]),
                             "ExactVerified"))
    return out


def check_scan(cfg: CheckConfig) -> list[Record]:
    n = cfg.n
    out = []
    for s in cfg.signs:
        alg = build_herm(n, s, cfg.field)
        scan = {}

        def run(alg=alg):
            scan.update(delta_scan(alg, cfg.deltas))
            return {k: v for k, v in scan.items() if k != "spaces"}

        def judge(r):
            return r["half_is_identity"] and r["only_one_and_half"]

        out.append(timed(f"scan.{_tag(s)}.n{n}", "claim:delta-derivations",
                         {"nonzero_only_at": ["1", "1/2"], "dim_at_1/2": 1}, run, judge, "ExactVerified"))
        if scan and "total_dim" in scan:
            der = scan["dims"].get("1")
            out.append(Record(f"scan.total.{_tag(s)}.n{n}", "claim:delta-derivations",
                              None if der is None else der + 1, scan["total_dim"],
                              PASS if der is not None and scan["total_dim"] == der + 1 else FAIL,
                              "ExactVerified"))
        spaces = scan.get("spaces", {})
        one, half = cfg.field(1), cfg.field(Fraction(1, 2))
        if one in spaces and half in spaces:
            out.append(timed(f"scan.composition.{_tag(s)}.n{n}", "claim:composition-law", True,
                             lambda alg=alg: [composition_check(alg, spaces[one], spaces[one]),
                                              composition_check(alg, spaces[one], spaces[half]),
                                              composition_check(alg, spaces[half], spaces[half])],
                             lambda r: all(x["passed"] for x in r), "ExactVerified"))
        if s is Sign.PLUS and n <= 3 and half in spaces:
            out.append(timed(f"scan.half-paths.plus.n{n}", "claim:unit-half-derivations", True,
                             lambda alg=alg: half_der_via_elements(alg) == spaces[half].subspace(cfg.field),
                             certification="ExactVerified"))
    return out


def check_forms(cfg: CheckConfig, box: float | None = None) -> list[Record]:
    n = cfg.n
    out = []
    for s in cfg.signs:
        def run(s=s):
            alg = build_herm(n, s, cfg.field)
            sol = assoc_form_space(alg)
            gram = trace_form_gram(n, s, cfg.field)
            lam = form_match(sol, gram)
            return {"dim": sol.dim, "nondegenerate": sol.nondegenerate, "lambda": lam,
                    "block_table_matches": gram == trace_form_block_table(n, s, cfg.field),
                    "trace_form_rank": gram_rank(gram, cfg.field), "algebra_dim": alg.dim}

        def judge(r):
            return (r["dim"] == 1 and all(r["nondegenerate"]) and r["lambda"] != 0
                    and r["block_table_matches"] and r["trace_form_rank"] == r["algebra_dim"])

        out.append(timed(f"forms.{_tag(s)}.n{n}", "claim:unique-invariant-form",
                         {"dim": 1, "nondegenerate": True, "proportional": True}, run, judge,
                         "ExactVerified", box=box))
    return out


def check_killing(cfg: CheckConfig) -> list[Record]:
    if cfg.n < 3:
        return [Record(f"killing.n{cfg.n}", "claim:killing-restriction", None,
                       "so_n Killing form vanishes or is degenerate for n < 3", INFO)]
    return [timed(f"killing.n{cfg.n}", "claim:killing-restriction", True,
                  lambda: killing_restriction_check(cfg.n, cfg.field), lambda r: r["proportional"])]


CHECKS: dict[str, Callable[[CheckConfig], list[Record]]] = {
    "dims": check_dims,
    "products": check_products,
    "simplicity": check_simplicity,
    "centroid": check_centroid,
    "lemmas": check_lemmas,
    "identities": check_identities,
    "derivations": check_derivations,
    "scan": check_scan,
    "forms": check_forms,
    "killing": check_killing,
}


def run_checks(names: Iterable[str], cfg: CheckConfig) -> list[Record]:
    records = []
    for name in names:
        records.extend(CHECKS[name](cfg))
    return records


# --------------------------------------------------------------------------
# acceptance suite


def _with(cfg: CheckConfig, **kw) -> CheckConfig:
    data = dict(cfg.__dict__)
    data.update(kw)
    return CheckConfig(**data)


def _prefix(records, k):
    for r in records:
        r.id = f"acceptance.{k}.{r.id}"
    return records


def acceptance_criteria(cfg: CheckConfig) -> list[tuple[int, str, Callable[[], list[Record]]]]:
    both = (Sign.PLUS, Sign.MINUS)
    q = _with(cfg, field=QQ, signs=both)

    def c1():
        out = []
        for n in range(1, 6):
            out += check_dims(_with(q, n=n))
        return out

    def c2():
        from .exactnum import GF
        return check_octonion_laws(q) + check_octonion_laws(_with(q, field=GF(7)))

    def c3():
        out = []
        for n in (2, 3, 4):
            out += check_products(_with(q, n=n))
        return out

    def c4():
        out = []
        for n in range(1, 5):
            out += check_simplicity(_with(q, n=n))
        return out

    def c5():
        out = []
        for n in range(1, 5):
            out += check_scan(_with(q, n=n))
            out += [r for r in check_derivations(_with(q, n=n)) if ".dim." in r.id]
        return out

    def c6():
        g = gl_cross_checks(3)
        s = gl_cross_checks(2)
        return [
            Record("gl3.delta=-1", "claim:gl-delta-derivations", 1, g["dims"]["-1"],
                   PASS if g["dims"]["-1"] == 1 else FAIL, "ExactVerified"),
            Record("gl3.delta=1/2", "claim:gl-delta-derivations", 2, g["dims"]["1/2"],
                   PASS if g["dims"]["1/2"] == 2 else FAIL, "ExactVerified"),
            Record("gl3.spans", "claim:gl-delta-derivations", True, g["checks"],
                   PASS if g["passed"] else FAIL, "ExactVerified"),
            Record("sl2.delta=-1", "claim:small-order-remarks", 5, s["sl2_minus_one"],
                   PASS if s["sl2_minus_one"] == 5 else FAIL, "ExactVerified"),
            Record("gl2.delta=-1", "claim:small-order-remarks", 6, s["gl2_minus_one"],
                   PASS if s["gl2_minus_one"] == 6 else FAIL, "ExactVerified"),
            Record("gl.delta=0", "derived", None, {"gl3": g["derived_delta_zero_dim"],
                                                   "gl2": s["derived_delta_zero_dim"]}, INFO, "ExactVerified"),
        ]

    def c7():
        out = []
        for n in (2, 3, 4):
            out.append(timed(f"kernels.n{n}", "claim:kernel-lemmas", True,
                             lambda n=n: lemma_kernels(n), lambda r: r["passed"]))
        for n in (2, 3):
            for d in (Fraction(1, 2), Fraction(-1)):
                out.append(timed(f"commutator-image.n{n}.delta={scalar_to_str(d)}",
                                 "claim:commutator-image-lemma", True,
                                 lambda n=n, d=d: {k: v for k, v in lemma_xdm_space(n, d).items()
                                                   if k != "space"},
                                 lambda r: r["image_in_E"], "ExactVerified"))
        for n in (2, 3, 4):
            out.append(timed(f"half-elements.plus.n{n}", "claim:unit-half-derivations", 1,
                             lambda n=n: half_der_elements(build_herm(n, Sign.PLUS)).dim,
                             certification="ExactVerified"))
        return out

    def c8():
        out = []
        for n in (1, 2, 3):
            out += check_centroid(_with(q, n=n))
        for r in check_centroid(_with(q, n=4), box=cfg.time_box):
            if r.verdict == TIMEOUT:
                r.verdict = INFO
            out.append(r)
        return out

    def c9():
        out = []
        for n in range(1, 5):
            out += check_identities(_with(q, n=n, signs=(Sign.PLUS,)))
        out += check_identities(_with(q, n=1, signs=(Sign.MINUS,)))
        return out

    def c10():
        out = []
        for n in (1, 2, 3):
            out += check_forms(_with(q, n=n))
        for n in (3, 4):
            out += check_killing(_with(q, n=n))
        for r in check_forms(_with(q, n=4, signs=(Sign.MINUS,)), box=cfg.time_box):
            if r.verdict == TIMEOUT:
                r.verdict = INFO
            out.append(r)
        return out

    def c11():
        out = []
        for n in (1, 2, 3):
            out += [r for r in check_derivations(_with(q, n=n, signs=(Sign.MINUS,))) if "known-span" in r.id]
        out += [r for r in check_derivations(_with(q, n=4, signs=(Sign.PLUS,))) if "known-span" in r.id]
        return out

    return [(1, "dimensions", c1), (2, "octonion laws", c2), (3, "product formulas", c3),
            (4, "simplicity", c4), (5, "delta-derivations", c5), (6, "gl and sl cross-checks", c6),
            (7, "kernel lemmas", c7), (8, "centroid", c8), (9, "identities", c9), (10, "forms", c10),
            (11, "known derivations", c11)]


def run_acceptance(cfg: CheckConfig, only: Iterable[int] | None = None) -> list[Record]:
    records = []
    for k, _name, fn in acceptance_criteria(cfg):
        if only is not None and k not in only:
            continue
        records.extend(_prefix(fn(), k))
    return records


def verdict_ok(records: Iterable[Record]) -> bool:
    return all(r.verdict in (PASS, INFO) for r in records)
