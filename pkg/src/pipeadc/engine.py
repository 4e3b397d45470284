"""Pipeline engine: drives samples through SHA -> six shared-OTA stages -> 2-bit flash.

Timing model
------------
The two-phase hardware schedule is collapsed to a per-sample dataflow with a
one-sample offset per slice: the decision a stage makes at sample n consumes
the residue its predecessor settled at sample n-1. A code therefore needs
``PIPELINE_LATENCY_SAMPLES`` steps to assemble, and the first that many
outputs of any run are warm-up.

Amplifier sharing
-----------------
Six stages ride on three shared amplifiers, paired (1,2), (3,4), (5,6); the
SHA has its own. Within one step the even stage of a pair amplifies right
after the odd one, so a shared amplifier's history alternates between the two
stages. With the reset phase enabled every amplification starts from a
discharged output (v_init = 0); without it, k_mem times the amplifier's
previous settled output is left as the starting point, which is the memory
effect the reset phase exists to kill.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import AdcConfig, N_STAGES, StageDecision, validate
from .stages import comparator_diff, settle_coefficients, settle_value, sub_adc_decide, flash2b

# SHA, six stages, flash: seven one-sample hops from input to a complete code.
PIPELINE_LATENCY_SAMPLES = 7

DEFAULT_PAIRING = ((1, 2), (3, 4), (5, 6))


@dataclass
class PipelineState:
    """Mutable sequential state: in-flight residues, per-amplifier memory, phase.

    residues[0] is the SHA output, residues[1..6] the stage residues settled
    at the previous step. ota_last[0] is the SHA amplifier, ota_last[1..3]
    the three shared amplifiers. Single-threaded by design; run independent
    engines for parallelism.
    """

    residues: list[float] = field(default_factory=lambda: [0.0] * (N_STAGES + 1))
    ota_last: list[float] = field(default_factory=lambda: [0.0] * 4)
    phase: int = 0
    n: int = 0


@dataclass(frozen=True)
class StageTrace:
    """Per-sample record: settled residues (SHA + 6 stages) and the raw decisions.

    decisions holds the six 1.5-bit entries; flash the 2-bit entry.
    """

    n: int
    vin: float
    residues: tuple[float, ...]
    decisions: tuple[StageDecision, ...]
    flash: StageDecision


@dataclass(frozen=True)
class SimulationResult:
    """Raw decision stream plus optional residue traces for one run.

    decisions has shape (n, 6) with values in {-1, 0, +1}; flash has shape
    (n,) with values in {0..3}; residues has shape (n, 7) when recorded.
    The first ``warmup`` entries were produced while the pipe was filling.
    """

    vin: np.ndarray
    decisions: np.ndarray
    flash: np.ndarray
    residues: np.ndarray | None
    fs: float
    warmup: int = PIPELINE_LATENCY_SAMPLES


@dataclass(frozen=True)
class SettleRow:
    """One line of the step-settling report."""

    stage: str
    ideal_mv: float
    simulated_mv: float
    error_pct: float


class PipelineEngine:
    """Compiled form of one AdcConfig: per-amplifier settling coefficients and thresholds.

    The engine itself is immutable after construction; sequential state lives
    in PipelineState objects, so one engine can serve many runs.
    """

    def __init__(self, config: AdcConfig, pairing: tuple[tuple[int, int], ...] = DEFAULT_PAIRING):
        self.config = validate(config)
        if sorted(a for pair in pairing for a in pair) != list(range(1, N_STAGES + 1)):
            raise ValueError("pairing must cover stages 1..6 exactly once")
        c = self.config
        t = c.clock.t_settle
        self.vref = c.reference.vref
        self._reset = c.clock.reset_enabled
        self._sha_g, self._sha_e = settle_coefficients(c.sha.ota, t)
        self._sha_kmem = c.sha.ota.k_mem
        self._slot_of = {}
        for slot, pair in enumerate(pairing, start=1):
            for stage_no in pair:
                self._slot_of[stage_no] = slot
        self._stage_g = []
        self._stage_e = []
        self._stage_kmem = []
        self._two_g = []
        self._dref = []
        for st in c.stages:
            g, e = settle_coefficients(st.ota, t)
            self._stage_g.append(g)
            self._stage_e.append(e)
            self._stage_kmem.append(st.ota.k_mem)
            self._two_g.append(2.0 * (1.0 + st.gain_mismatch))
            self._dref.append((1.0 + st.dac_mismatch) * c.reference.vref)
        self._memoryless = self._reset or (
            self._sha_kmem == 0.0 and all(k == 0.0 for k in self._stage_kmem))

    def new_state(self) -> PipelineState:
        return PipelineState()

    # -- scalar state machine ------------------------------------------------

    def step(self, vin: float, state: PipelineState) -> tuple[tuple[int, ...], int, StageTrace]:
        """Advance one sample; mutates state, returns this step's raw decisions.

        All stage decisions read the residues the previous step left behind,
        so the data for one input sample marches down the chain one slice per
        step.
        """
        c = self.config
        prev = state.residues
        new_res = [0.0] * (N_STAGES + 1)

        v_init = 0.0 if self._reset else self._sha_kmem * state.ota_last[0]
        sha_out = settle_value(vin, v_init, self._sha_g, self._sha_e)
        state.ota_last[0] = sha_out
        new_res[0] = sha_out

        decisions = []
        for k in range(1, N_STAGES + 1):
            st = c.stages[k - 1]
            u = prev[k - 1]
            d = sub_adc_decide(u, st, self.vref)
            target = self._two_g[k - 1] * u - d * self._dref[k - 1]
            slot = self._slot_of[k]
            v_init = 0.0 if self._reset else self._stage_kmem[k - 1] * state.ota_last[slot]
            out = settle_value(target, v_init, self._stage_g[k - 1], self._stage_e[k - 1])
            state.ota_last[slot] = out
            new_res[k] = out
            decisions.append(d)

        d_flash = flash2b(prev[N_STAGES], c.flash_offsets, self.vref)
        state.residues = new_res
        n = state.n
        state.n += 1
        state.phase ^= 1
        trace = StageTrace(n=n, vin=vin, residues=tuple(new_res),
                           decisions=tuple(StageDecision(d=d) for d in decisions),
                           flash=StageDecision(d_flash=d_flash))
        return tuple(decisions), d_flash, trace

    # -- batch driver ----------------------------------------------------------

    def simulate(self, waveform, record_residues: bool = True) -> SimulationResult:
        """Run a whole waveform; output length equals input length.

        Memoryless configs (reset enabled, or every k_mem zero) go through a
        vectorized path that is bit-identical to stepping sample by sample;
        configs with amplifier memory fall back to the sequential path.
        """
        v = np.asarray(waveform, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("empty waveform")
        if self._memoryless:
            return self._simulate_vectorized(v, record_residues)
        return self._simulate_stepped(v, record_residues)

    def _simulate_vectorized(self, v: np.ndarray, record_residues: bool) -> SimulationResult:
        n = v.size
        vref = self.vref
        decisions = np.empty((n, N_STAGES), dtype=np.int8)
        residues = np.empty((n, N_STAGES + 1), dtype=np.float64) if record_residues else None

        settled = settle_value(v, 0.0, self._sha_g, self._sha_e)
        if record_residues:
            residues[:, 0] = settled
        u = np.empty(n, dtype=np.float64)
        for k in range(1, N_STAGES + 1):
            st = self.config.stages[k - 1]
            u[0] = 0.0
            u[1:] = settled[:-1]
            v_hi = comparator_diff(0.25 * vref, -0.25 * vref, u, -u)
            v_lo = comparator_diff(-0.25 * vref, 0.25 * vref, u, -u)
            d = np.where(v_hi < -2.0 * st.cmp_offset_hi, 1,
                         np.where(v_lo > -2.0 * st.cmp_offset_lo, -1, 0)).astype(np.int8)
            target = self._two_g[k - 1] * u - d * self._dref[k - 1]
            settled = settle_value(target, 0.0, self._stage_g[k - 1], self._stage_e[k - 1])
            decisions[:, k - 1] = d
            if record_residues:
                residues[:, k] = settled

        u[0] = 0.0
        u[1:] = settled[:-1]
        flash = np.zeros(n, dtype=np.int8)
        for thr, off in zip((-0.5 * vref, 0.0, 0.5 * vref), self.config.flash_offsets):
            v_diff = comparator_diff(thr, -thr, u, -u)
            flash += (v_diff < -2.0 * off)
        return SimulationResult(vin=v, decisions=decisions, flash=flash,
                                residues=residues, fs=self.config.clock.fs)

    def _simulate_stepped(self, v: np.ndarray, record_residues: bool) -> SimulationResult:
        n = v.size
        decisions = np.empty((n, N_STAGES), dtype=np.int8)
        flash = np.empty(n, dtype=np.int8)
        residues = np.empty((n, N_STAGES + 1), dtype=np.float64) if record_residues else None
        state = self.new_state()
        for i in range(n):
            ds, d_flash, trace = self.step(float(v[i]), state)
            decisions[i, :] = ds
            flash[i] = d_flash
            if record_residues:
                residues[i, :] = trace.residues
        return SimulationResult(vin=v, decisions=decisions, flash=flash,
                                residues=residues, fs=self.config.clock.fs)


def simulate(waveform, config: AdcConfig, record_residues: bool = True) -> SimulationResult:
    """One-shot batch run with a fresh engine."""
    return PipelineEngine(config).simulate(waveform, record_residues=record_residues)


def settle_report(config: AdcConfig) -> list[SettleRow]:
    """Full-swing step experiment: settled level and percent error per slice.

    A -vref to +vref step is applied and held; once the pipe reaches steady
    state each slice's settled output is compared against its own input (the
    value a perfect full-scale pass would reproduce), which chains the report
    exactly like a bench measurement of the setup error: the ideal column of
    row k is the simulated column of row k-1.
    """
    eng = PipelineEngine(config)
    vref = config.reference.vref
    wave = np.concatenate([np.full(32, -vref), np.full(32, vref)])
    res = eng.simulate(wave).residues[-1]
    rows = []
    ideal = vref
    names = ["SHA"] + [f"Stage{k}" for k in range(1, N_STAGES + 1)]
    for i, name in enumerate(names):
        sim = float(res[i])
        err_pct = (ideal - sim) / ideal * 100.0
        rows.append(SettleRow(stage=name, ideal_mv=ideal * 1e3,
                              simulated_mv=sim * 1e3, error_pct=err_pct))
        ideal = sim
    return rows
