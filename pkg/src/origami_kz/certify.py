"""End-to-end certification pipeline.

Stages exchange plain JSON dictionaries, so any stage can be resumed from
cache files and any emitted report can be re-checked by ``verify_report``.
Reports are deterministic: no timestamps, sorted keys.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from origami_kz import __version__
from origami_kz import fixtures as F
from origami_kz import matrices as mx
from origami_kz.arithmeticity import (
    arithmeticity_verdict,
    density_certificate,
    evaluate_ab_word,
    kernel_relation_check,
    unipotent_certificate,
    unipotent_search,
)
from origami_kz.homology import Homology, HomologyBasis, HomologyError, absolute_basis, check_basis
from origami_kz.kz import CocycleError, KZCocycle, change_basis, is_symplectic
from origami_kz.origami import (
    OrbitGraph,
    Origami,
    canonical_form,
    cusps,
    homological_dimension,
    horizontal_cylinders,
    sl2z_orbit,
    stabilizes,
    stratum,
    veech_group,
)
from origami_kz.perm import format_cycles
from origami_kz.pingpong import NotMember, PingPongTable, membership_normal_form, verify_pingpong
from origami_kz.words import Word, sl2_matrix

STAGES = ("stratum", "orbit", "veech", "homology", "kz", "pinching", "arithmeticity", "pingpong")
UPSTREAM = {
    "stratum": (), "orbit": (), "veech": ("orbit",), "homology": ("orbit",),
    "kz": ("orbit", "homology"), "pinching": ("orbit", "homology", "kz"),
    "arithmeticity": ("orbit", "homology", "kz", "pinching"), "pingpong": ("orbit", "veech"),
}
CERTIFIED, NOT_CERTIFIED, SKIPPED = "certified", "not certified", "skipped"
REPORT_FORMAT = "origami-kz-report"
KERNEL_WORD = "(a b a^-1 b a^-1 b a b^-1)^3"


class PipelineError(RuntimeError):
    """Operational failure (bad input, missing cache); distinct from 'not certified'."""


@dataclass
class RunConfig:
    origami: Origami
    max_syllables: int = 10
    density_depth: int = 2
    cache_dir: Path | None = None
    seed: int = 0

    def __post_init__(self):
        if self.max_syllables < 1 or self.density_depth < 1:
            raise PipelineError("search bounds must be positive")

    def to_json(self) -> dict:
        return {"max_syllables": self.max_syllables, "density_depth": self.density_depth}


def cache_key(o: Origami) -> str:
    canon = canonical_form(o)[0]
    return hashlib.sha256(canon.to_text().encode()).hexdigest()[:16]


def is_o1_orbit(o: Origami) -> bool:
    return canonical_form(o)[0] == canonical_form(F.o1())[0]


def _kernel_word() -> Word:
    return Word.parse("a b a^-1 b a^-1 b a b^-1") ** 3


def _mat(rows) -> mx.Matrix:
    return mx.mat(rows)


class Pipeline:
    """Runs stages on demand; upstream results come from memory, cache, or a fresh run."""

    def __init__(self, cfg: RunConfig, *, replay_hits: list[str] | None = None):
        self.cfg = cfg
        self.o = cfg.origami
        self.o1 = is_o1_orbit(self.o)
        self.results: dict[str, dict] = {}
        self.replay_hits = replay_hits
        self._graph: OrbitGraph | None = None
        self._cocycle: KZCocycle | None = None
        self._strict_cache = False

    # -- plumbing

    @property
    def cache_path(self) -> Path | None:
        if self.cfg.cache_dir is None:
            return None
        return Path(self.cfg.cache_dir) / cache_key(self.o)

    def need(self, stage: str) -> dict:
        if stage in self.results:
            return self.results[stage]
        path = self.cache_path
        if path is not None and (path / f"{stage}.json").exists():
            data = json.loads((path / f"{stage}.json").read_text())
            self.results[stage] = data
            return data
        if self._strict_cache:
            raise PipelineError(
                f"missing upstream result '{stage}' in {path}; run `--stage {stage}` with the same "
                f"--cache-dir first (or certify-all)")
        return self.run(stage)

    def run(self, stage: str) -> dict:
        if stage not in STAGES:
            raise PipelineError(f"unknown stage {stage!r}")
        data = getattr(self, f"_stage_{stage}")()
        self.results[stage] = data
        if self.cache_path is not None:
            self.cache_path.mkdir(parents=True, exist_ok=True)
            (self.cache_path / f"{stage}.json").write_text(dumps(data))
        return data

    def run_single(self, stage: str) -> dict:
        """One stage; with a cache dir, upstream results must already be cached."""
        self._strict_cache = self.cfg.cache_dir is not None
        for up in UPSTREAM[stage]:
            self.need(up)
        self._strict_cache = False
        return self.run(stage)

    @property
    def graph(self) -> OrbitGraph:
        if self._graph is None:
            self._graph = OrbitGraph.from_json(self.need("orbit")["graph"])
        return self._graph

    @property
    def cocycle(self) -> KZCocycle:
        if self._cocycle is None:
            self._cocycle = KZCocycle(self.graph)
        return self._cocycle

    def basis(self) -> HomologyBasis:
        return HomologyBasis.from_json(self.need("homology")["basis"])

    def genus(self) -> int:
        return self.need("homology")["genus"]

    def omega(self) -> mx.Matrix:
        return _mat(self.need("homology")["omega"])

    # -- stages

    def _stage_stratum(self) -> dict:
        self.o.check_transitive()
        st = stratum(self.o)
        return {
            "status": CERTIFIED,
            "origami": self.o.to_text(),
            "n": self.o.n,
            "commutator": format_cycles(self.o.commutator()),
            "zero_orders": list(st.zero_orders),
            "stratum": str(st),
            "genus": st.genus,
        }

    def _stage_orbit(self) -> dict:
        g = sl2z_orbit(self.o)
        return {
            "status": CERTIFIED,
            "size": len(g),
            "cusps": [list(c) for c in cusps(g)],
            "graph": g.to_json(),
        }

    def _stage_veech(self) -> dict:
        vg = veech_group(self.graph)
        data = {"status": CERTIFIED, **vg.to_json()}
        if self.o1:
            named = {}
            for name in ("a", "b"):
                w = F.named_word(name)
                ok = stabilizes(self.graph, w)
                named[name] = {"word": str(w), "matrix": mx.as_lists(sl2_matrix(w)), "stabilizes": ok}
                if not ok:
                    data["status"] = NOT_CERTIFIED
            data["named_generators"] = named
        return data

    def _stage_homology(self) -> dict:
        g = self.graph
        base = g.nodes[g.base]
        hom = Homology(base)
        if self.o1:
            basis = F.bases_on_graph(g)[g.base]
            check_basis(basis, hom)
            source = "fixture basis B_1"
        else:
            basis = absolute_basis(base, hom)
            source = "computed absolute basis"
        data = {
            "status": CERTIFIED,
            "genus": hom.genus,
            "basis_source": source,
            "basis": basis.to_json(),
            "full_form": mx.as_lists(hom.intersection_matrix(basis.vectors)),
            "omega": mx.as_lists(hom.intersection_matrix(basis.zero_part)) if hom.genus > 1 else [],
            "tautological_pairing": hom.intersection(hom.sigma0, hom.zeta0),
            "horizontal_cylinders": [
                {"rows": [list(r) for r in c.rows], "width": c.width, "height": c.height}
                for c in horizontal_cylinders(base)
            ],
            "homological_dimension": homological_dimension(g),
        }
        if hom.genus == 1:
            data["note"] = "genus 1: H_1^(0) is trivial"
        return data

    def generator_words(self) -> dict[str, Word]:
        if self.o1:
            return {k: F.named_word(k) for k in ("a", "b", "p1", "p2")}
        gens = self.need("veech")["schreier_generators"]
        return {f"g{i + 1}": Word.parse(s["word"]) for i, s in enumerate(gens)}

    def _stage_kz(self) -> dict:
        basis = self.basis()
        words = self.generator_words()
        omega = self.omega()
        mono = {}
        status = CERTIFIED
        problems = []
        for name, w in words.items():
            try:
                m = self.cocycle.monodromy(w, basis, integral=self.o1)
            except (CocycleError, HomologyError) as exc:
                problems.append(f"{name}: {exc}")
                continue
            mono[name] = {"word": str(w), "full": mx.as_lists(m.full), "taut": mx.as_lists(m.taut),
                          "rho": mx.as_lists(m.zero_part)}
            if self.genus() > 1 and not is_symplectic(m.zero_part, omega):
                problems.append(f"{name}: rho does not preserve the intersection form")
        data = {"status": status, "monodromy": mono,
                "integral": all(isinstance(x, int) for m in mono.values() for r in m["full"] for x in r)}
        if self.o1:
            data["elementary"] = {k: mx.as_lists(v) for k, v in F.elementary_matrices(self.cocycle).items()}
            for name in ("a", "b"):
                if name in mono and not mx.is_identity(mx.power(_mat(mono[name]["rho"]), 3)):
                    problems.append(f"rho({name})^3 != Id")
        if problems:
            data["status"] = NOT_CERTIFIED
            data["problems"] = problems
        return data

    def _stage_pinching(self) -> dict:
        if self.genus() == 1:
            return {"status": SKIPPED, "note": "genus 1: H_1^(0) trivial, arithmeticity pipeline skipped"}
        omega = self.omega()
        if len(omega) != 4:
            return {"status": NOT_CERTIFIED,
                    "note": f"density certificate needs a rank-4 H_1^(0); got rank {len(omega)}"}
        self.need("kz")
        words = self.generator_words()
        if self.o1:
            candidates = [words["p1"], words["p2"]]
            fallback = [words["a"], words["b"]]
        else:
            candidates, fallback = [], list(words.values())
        cert = density_certificate(self.cocycle, self.basis(), candidates, omega,
                                   fallback_generators=fallback, depth=self.cfg.density_depth,
                                   integral=self.o1)
        return {"status": CERTIFIED if cert.verdict else NOT_CERTIFIED, "certificate": cert.to_json()}

    def _stage_arithmeticity(self) -> dict:
        if self.genus() == 1:
            return {"status": SKIPPED, "note": "genus 1: H_1^(0) trivial, arithmeticity pipeline skipped"}
        if not self.o1:
            return {"status": NOT_CERTIFIED,
                    "note": "no basis change and unipotent word data for this orbit"}
        mono = self.need("kz")["monodromy"]
        dense = self.need("pinching")["status"] == CERTIFIED
        theta, p, omega = F.theta(), F.perm_matrix_p(), self.omega()
        a = change_basis(_mat(mono["a"]["rho"]), theta)
        b = change_basis(_mat(mono["b"]["rho"]), theta)
        if self.replay_hits is None:
            hits = [str(w) for w, _ in unipotent_search(a, b, p, self.cfg.max_syllables)]
        else:
            hits = self.replay_hits
        for h in hits:
            w = Word.parse(h) if h != "1" else Word()
            if len(w.syllables) > self.cfg.max_syllables:
                raise PipelineError(f"search hit {h} exceeds the syllable bound")
            m = evaluate_ab_word(w, a, b, p)
            if any(m[i][0] != int(i == 0) for i in range(4)):
                raise PipelineError(f"search hit {h} does not fix the first basis vector")
        wanted = F.unipotent_words()
        missing = [k for k, w in wanted.items() if str(w) not in hits]
        data = {
            "A": mx.as_lists(a), "B": mx.as_lists(b),
            "search": {"max_syllables": self.cfg.max_syllables, "alphabet": ["A", "A^2", "B", "B^2"],
                       "hits": hits},
        }
        unip_ok = False
        if missing:
            data["unipotent"] = {"verdict": "not certified",
                                 "note": f"bound exceeded: {', '.join(missing)} not found within "
                                         f"{self.cfg.max_syllables} syllables"}
        else:
            cert = unipotent_certificate(a, b, p, theta, omega, wanted)
            data["unipotent"] = cert.to_json()
            unip_ok = cert.verdict
        kw = kernel_relation_check(_kernel_word(), self.cocycle, self.basis(),
                                   {"a": F.named_word("a"), "b": F.named_word("b")})
        data["kernel_witness"] = {**kw.to_json(), "word": KERNEL_WORD}
        report = arithmeticity_verdict(dense, unip_ok)
        data["verdict"] = report.to_json()
        data["status"] = CERTIFIED if report.arithmetic and kw.is_witness else NOT_CERTIFIED
        return data

    def _stage_pingpong(self) -> dict:
        if stratum(self.o).genus == 1:
            return {"status": SKIPPED, "note": "genus 1: arithmeticity pipeline skipped"}
        if not self.o1:
            return {"status": NOT_CERTIFIED, "note": "no ping-pong table for this orbit"}
        table = PingPongTable.from_fixture(F.pingpong_fixture())
        a, b = sl2_matrix(F.named_word("a")), sl2_matrix(F.named_word("b"))
        cert = verify_pingpong(a, b, table)
        members = []
        all_members = cert.valid
        if cert.valid:
            for s in self.need("veech")["schreier_generators"]:
                r = membership_normal_form(_mat(s["matrix"]), cert)
                ok = not isinstance(r, NotMember)
                all_members &= ok
                members.append({"schreier_word": s["word"], "matrix": s["matrix"],
                                "normal_form": str(r) if ok else None})
        return {"status": CERTIFIED if all_members else NOT_CERTIFIED,
                "certificate": cert.to_json(), "membership": members,
                "generated_by_a_b": all_members}


# ---------------------------------------------------------------- reports

def dumps(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def overall_status(stages: dict[str, dict]) -> str:
    return CERTIFIED if all(s["status"] in (CERTIFIED, SKIPPED) for s in stages.values()) else NOT_CERTIFIED


def build_report(cfg: RunConfig, stages: dict[str, dict]) -> dict:
    report = {
        "format": REPORT_FORMAT,
        "version": 1,
        "origami": cfg.origami.to_text(),
        "config": cfg.to_json(),
        "stages": stages,
        "status": overall_status(stages),
        "metadata": {"tool": "origami-kz", "tool_version": __version__},
    }
    arith = stages.get("arithmeticity", {}).get("verdict")
    if arith:
        report["verdict"] = arith["verdict"]
    return report


class StageFailure(PipelineError):
    def __init__(self, stage: str, exc: BaseException):
        super().__init__(f"stage {stage} failed: {type(exc).__name__}: {exc}")
        self.stage = stage


def certify_all(cfg: RunConfig, pipe: Pipeline | None = None,
                progress: Callable[[str, dict], None] | None = None) -> dict:
    """Run every stage in order (cached results are reused) and build the report."""
    pipe = pipe or Pipeline(cfg)
    stages = {}
    for stage in STAGES:
        try:
            stages[stage] = pipe.need(stage)
        except PipelineError:
            raise
        except Exception as exc:
            raise StageFailure(stage, exc) from exc
        if progress:
            progress(stage, stages[stage])
    return build_report(cfg, stages)


def run_stage(cfg: RunConfig, stage: str, pipe: Pipeline | None = None) -> dict:
    pipe = pipe or Pipeline(cfg)
    try:
        data = pipe.run_single(stage)
    except PipelineError:
        raise
    except Exception as exc:
        raise StageFailure(stage, exc) from exc
    return build_report(cfg, {stage: data})


# ---------------------------------------------------------------- verification

@dataclass
class VerificationResult:
    problems: list[str] = field(default_factory=list)
    checked: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems and bool(self.checked)


def _diff(path: str, expected, found, out: list[str], limit: int = 5) -> None:
    if len(out) >= limit or expected == found:
        return
    if isinstance(expected, dict) and isinstance(found, dict):
        for k in sorted(set(expected) | set(found)):
            _diff(f"{path}.{k}", expected.get(k), found.get(k), out, limit)
    elif isinstance(expected, list) and isinstance(found, list) and len(expected) == len(found):
        for i, (x, y) in enumerate(zip(expected, found)):
            _diff(f"{path}[{i}]", x, y, out, limit)
    else:
        out.append(f"{path}: recomputed {json.dumps(expected)} but certificate has {json.dumps(found)}")


def verify_report(doc: dict) -> VerificationResult:
    """Re-derive every stage in ``doc`` and compare it entry by entry.

    The only search (unipotent words) is not repeated: its hits are replayed
    instead, each checked to fix the first basis vector within the bound.
    """
    from origami_kz.origami import parse_origami

    res = VerificationResult()
    if doc.get("format") != REPORT_FORMAT:
        res.problems.append("not an origami-kz report")
        return res
    conf = doc.get("config", {})
    cfg = RunConfig(parse_origami(doc["origami"]), max_syllables=conf.get("max_syllables", 10),
                    density_depth=conf.get("density_depth", 2))
    stages = doc.get("stages", {})
    hits = stages.get("arithmeticity", {}).get("search", {}).get("hits")
    pipe = Pipeline(cfg, replay_hits=hits)
    for stage in STAGES:
        if stage not in stages:
            continue
        try:
            recomputed = json.loads(dumps(pipe.run(stage)))
        except Exception as exc:  # any failure to re-derive is a verification failure
            res.problems.append(f"{stage}: {type(exc).__name__}: {exc}")
            continue
        before = len(res.problems)
        _diff(stage, recomputed, stages[stage], res.problems)
        if len(res.problems) == before:
            res.checked.append(stage)
    if doc.get("status") != overall_status(stages):
        res.problems.append("overall status does not follow from the stage statuses")
    arith = stages.get("arithmeticity", {}).get("verdict")
    if arith and doc.get("verdict") != arith["verdict"]:
        res.problems.append("top-level verdict differs from the arithmeticity stage")
    return res
