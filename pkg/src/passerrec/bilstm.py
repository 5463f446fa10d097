"""Bidirectional LSTM classifier whose weights are searched, not back-propagated."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.special import expit
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .optim import OPTIMIZERS, PLConfig

__all__ = [
    "COMBINE_MODES",
    "GateParams",
    "LstmParams",
    "ModelShape",
    "BiLstmModel",
    "ParamVector",
    "reshape_input",
    "lstm_step",
    "bilstm_forward",
    "predict",
    "param_count",
    "flatten",
    "unflatten",
    "mse_objective",
    "MseObjective",
    "train",
    "BiLstmClassifier",
]

COMBINE_MODES = ("concat", "add", "average", "multiply")
GATES = ("input_gate", "forget_gate", "output_gate", "candidate")


@dataclass(frozen=True)
class ModelShape:
    steps: int
    step_dim: int
    hidden: int

    def __post_init__(self):
        for name in ("steps", "step_dim", "hidden"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def feature_dim(self):
        return self.steps * self.step_dim

    @classmethod
    def for_features(cls, n_features, steps, hidden):
        if n_features % steps:
            raise ValueError(f"{n_features} features cannot be split into {steps} equal steps")
        return cls(steps, n_features // steps, hidden)


@dataclass
class GateParams:
    W: np.ndarray  # (H, d)
    U: np.ndarray  # (H, H)
    b: np.ndarray  # (H,)

    @classmethod
    def zeros(cls, hidden, step_dim):
        return cls(np.zeros((hidden, step_dim)), np.zeros((hidden, hidden)), np.zeros(hidden))


@dataclass
class LstmParams:
    input_gate: GateParams
    forget_gate: GateParams
    output_gate: GateParams
    candidate: GateParams

    @classmethod
    def zeros(cls, hidden, step_dim):
        return cls(*(GateParams.zeros(hidden, step_dim) for _ in GATES))

    def stacked(self):
        """Gate weights stacked in E, J, P, m order: ``(4H, d)``, ``(4H, H)``, ``(4H,)``."""
        gates = [getattr(self, g) for g in GATES]
        return (np.vstack([g.W for g in gates]), np.vstack([g.U for g in gates]),
                np.concatenate([g.b for g in gates]))


def _head_size(shape, combine):
    if combine not in COMBINE_MODES:
        raise ValueError(f"combine must be one of {COMBINE_MODES}, got {combine!r}")
    return 2 * shape.hidden if combine == "concat" else shape.hidden


@dataclass
class BiLstmModel:
    forward: LstmParams
    backward: LstmParams
    head_w: np.ndarray
    head_b: float
    shape: ModelShape
    combine: str = "concat"

    def __post_init__(self):
        if len(self.head_w) != _head_size(self.shape, self.combine):
            raise ValueError("head_w length does not match the combine mode")

    @classmethod
    def zeros(cls, shape, combine="concat"):
        h, d = shape.hidden, shape.step_dim
        return cls(LstmParams.zeros(h, d), LstmParams.zeros(h, d),
                   np.zeros(_head_size(shape, combine)), 0.0, shape, combine)


@dataclass(frozen=True)
class ParamVector:
    values: np.ndarray
    layout: tuple  # ((path, shape), ...) in storage order

    def __len__(self):
        return len(self.values)


def reshape_input(feature, shape: ModelShape):
    """Chunk a length ``T*d`` feature (or an ``(N, T*d)`` batch) into steps."""
    x = np.asarray(feature, dtype=float)
    if x.shape[-1] != shape.feature_dim:
        raise ValueError(f"feature dimension {x.shape[-1]} != {shape.steps} x {shape.step_dim}")
    return x.reshape(x.shape[:-1] + (shape.steps, shape.step_dim))


def lstm_step(params: LstmParams, x_t, h_prev, c_prev):
    """One LSTM update; works on single vectors or on a leading batch axis."""
    w, u, b = params.stacked()
    return _cell(x_t @ w.T + h_prev @ u.T + b, c_prev)


def _cell(z, c_prev):
    hidden = z.shape[-1] // 4
    e, j, p = (expit(z[..., k * hidden:(k + 1) * hidden]) for k in range(3))
    cand = np.tanh(z[..., 3 * hidden:])
    c = j * c_prev + e * cand
    return p * np.tanh(c), c


def _run_chain(params: LstmParams, steps_data, reverse):
    """Final hidden state of one direction, computed hidden-major ``(H, N)``.

    Weights are pre-scaled so that a single tanh call covers all four gates,
    via sigmoid(x) = (1 + tanh(x/2)) / 2.
    """
    w, u, b = params.stacked()
    hidden = u.shape[1]
    scale = np.full(4 * hidden, 0.5)
    scale[3 * hidden:] = 1.0
    w_t = (w * scale[:, None]).T
    u = u * scale[:, None]
    b = (b * scale)[:, None]
    n = steps_data[0].shape[0]
    h = np.zeros((hidden, n))
    c = np.zeros((hidden, n))
    z = np.empty((4 * hidden, n))
    gates = z[:3 * hidden]
    order = reversed(steps_data) if reverse else steps_data
    for x_t in order:
        np.matmul(u, h, out=z)
        z += np.asarray(x_t @ w_t).T
        z += b
        np.tanh(z, out=z)
        gates *= 0.5
        gates += 0.5
        c *= z[hidden:2 * hidden]
        c += z[:hidden] * z[3 * hidden:]
        h = z[2 * hidden:3 * hidden] * np.tanh(c)
    return h.T


def _combine(hf, hb, mode):
    if mode == "concat":
        return np.concatenate([hf, hb], axis=-1)
    if mode == "add":
        return hf + hb
    if mode == "average":
        return 0.5 * (hf + hb)
    if mode == "multiply":
        return hf * hb
    raise ValueError(f"unknown combine mode {mode!r}")


def _split_steps(x, shape: ModelShape, sparse=False):
    """``(N, T*d)`` -> list of ``T`` per-step ``(N, d)`` blocks."""
    seq = reshape_input(x, shape)
    blocks = [np.ascontiguousarray(seq[:, t]) for t in range(shape.steps)]
    return [sp.csr_matrix(blk) for blk in blocks] if sparse else blocks


def _forward_steps(model: BiLstmModel, steps_data):
    hf = _run_chain(model.forward, steps_data, reverse=False)
    hb = _run_chain(model.backward, steps_data, reverse=True)
    return _combine(hf, hb, model.combine)


def bilstm_forward(model: BiLstmModel, sequence):
    """Combine the forward chain's last state with the backward chain's first.

    ``sequence`` is ``(T, d)`` or a batch ``(N, T, d)``; both chains start
    from zero hidden and cell states.
    """
    seq = np.asarray(sequence, dtype=float)
    single = seq.ndim == 2
    if single:
        seq = seq[None]
    if seq.shape[1:] != (model.shape.steps, model.shape.step_dim):
        raise ValueError(f"sequence shape {seq.shape[1:]} does not match model shape")
    out = _forward_steps(model, [seq[:, t] for t in range(model.shape.steps)])
    return out[0] if single else out


def predict(model: BiLstmModel, feature):
    """Recommendation score ``sigmoid(head_w . combined + head_b)`` in (0, 1)."""
    combined = bilstm_forward(model, reshape_input(feature, model.shape))
    return expit(combined @ model.head_w + model.head_b)


def _layout(shape: ModelShape, combine):
    h, d = shape.hidden, shape.step_dim
    entries = []
    for direction in ("forward", "backward"):
        for gate in GATES:
            entries += [((direction, gate, "W"), (h, d)), ((direction, gate, "U"), (h, h)),
                        ((direction, gate, "b"), (h,))]
    entries += [(("head_w",), (_head_size(shape, combine),)), (("head_b",), ())]
    return tuple(entries)


def param_count(shape: ModelShape, combine="concat"):
    h, d = shape.hidden, shape.step_dim
    return 2 * 4 * (h * d + h * h + h) + _head_size(shape, combine) + 1


def flatten(model: BiLstmModel) -> ParamVector:
    parts = []
    layout = _layout(model.shape, model.combine)
    for path, _ in layout:
        if path[0] == "head_w":
            parts.append(model.head_w)
        elif path[0] == "head_b":
            parts.append([model.head_b])
        else:
            direction, gate, name = path
            parts.append(getattr(getattr(getattr(model, direction), gate), name).ravel())
    return ParamVector(np.concatenate([np.asarray(p, dtype=float) for p in parts]), layout)


def unflatten(vec, shape: ModelShape, combine="concat") -> BiLstmModel:
    """Rebuild a model from a flat vector laid out as :func:`flatten` writes it."""
    values = np.asarray(getattr(vec, "values", vec), dtype=float)
    expected = param_count(shape, combine)
    if values.shape != (expected,):
        raise ValueError(f"parameter vector has length {values.size}, expected {expected}")
    chains = {"forward": {}, "backward": {}}
    head_w, head_b = None, 0.0
    pos = 0
    for path, part_shape in _layout(shape, combine):
        size = int(np.prod(part_shape, dtype=int))
        chunk = values[pos:pos + size]
        pos += size
        if path[0] == "head_w":
            head_w = chunk.copy()
        elif path[0] == "head_b":
            head_b = float(chunk[0])
        else:
            direction, gate, name = path
            chains[direction].setdefault(gate, {})[name] = chunk.reshape(part_shape).copy()
    fwd, bwd = (LstmParams(*(GateParams(**chains[side][g]) for g in GATES))
                for side in ("forward", "backward"))
    return BiLstmModel(fwd, bwd, head_w, head_b, shape, combine)


class MseObjective:
    """Mean squared error of a flat parameter vector on a fixed dataset.

    The data is reshaped once up front. Sparse inputs (TF-IDF rows are
    mostly zero) stay sparse for the input projection.
    """

    def __init__(self, X, y, shape: ModelShape, combine="concat"):
        y = np.asarray(y, dtype=float)
        if len(y) == 0:
            raise ValueError("dataset is empty")
        n = len(y)
        if sp.issparse(X):
            X = X.toarray()
        X = np.asarray(X, dtype=float)
        sparse = X.size > 0 and np.count_nonzero(X) < 0.2 * X.size
        self._steps = _split_steps(X, shape, sparse)
        self.y = y
        self.shape, self.combine = shape, combine

    def scores(self, vec):
        model = unflatten(vec, self.shape, self.combine)
        combined = _forward_steps(model, self._steps)
        return expit(combined @ model.head_w + model.head_b)

    def __call__(self, vec):
        return float(np.mean((self.scores(vec) - self.y) ** 2))


def mse_objective(vec, X, y, shape: ModelShape, combine="concat"):
    return MseObjective(X, y, shape, combine)(vec)


def train(X, y, shape: ModelShape, combine="concat", opt_config: PLConfig | None = None,
          param_bound=2.0, optimizer="passer", n_jobs=1):
    """Search the flat parameter space in ``[-param_bound, param_bound]``.

    ``opt_config`` supplies population size, iteration budget and seed; its
    bounds are replaced by the parameter box. Returns ``(model, result)``.
    """
    objective = MseObjective(X, y, shape, combine)
    dim = param_count(shape, combine)
    base = opt_config if opt_config is not None else PLConfig((-param_bound, param_bound), dim=dim)
    config = PLConfig(
        bounds=(-param_bound, param_bound), dim=dim, pop_size=base.pop_size,
        max_iter=base.max_iter, producer_fraction=base.producer_fraction,
        investigator_fraction=base.investigator_fraction,
        awareness_probability=base.awareness_probability,
        flight_length=base.flight_length, seed=base.seed,
    )
    try:
        run = OPTIMIZERS[optimizer]
    except KeyError:
        raise ValueError(f"unknown optimizer {optimizer!r}") from None
    result = run(objective, config, n_jobs=n_jobs)
    return unflatten(result.best_position, shape, combine), result


def save_model(model: BiLstmModel, params_fh, header_fh, param_bound=None):
    for v in flatten(model).values:
        params_fh.write(f"{v:.17g}\n")
    s = model.shape
    header_fh.write("bilstm v1\n")
    header_fh.write(f"steps = {s.steps}\nstep_dim = {s.step_dim}\nhidden = {s.hidden}\n")
    header_fh.write(f"combine = {model.combine}\n")
    if param_bound is not None:
        header_fh.write(f"param_bound = {float(param_bound)!r}\n")


def load_model(params_fh, header_fh) -> BiLstmModel:
    lines = [ln.strip() for ln in header_fh if ln.strip()]
    if not lines or lines[0] != "bilstm v1":
        raise ValueError("not a bilstm v1 header")
    meta = dict(ln.split(" = ", 1) for ln in lines[1:])
    shape = ModelShape(int(meta["steps"]), int(meta["step_dim"]), int(meta["hidden"]))
    values = np.array([float(ln) for ln in params_fh if ln.strip()])
    return unflatten(values, shape, meta["combine"])


class BiLstmClassifier(ClassifierMixin, BaseEstimator):
    """Binary Bi-LSTM recommender trained by a population optimizer.

    Each feature row of width ``D`` is read as ``steps`` chunks of
    ``D / steps`` values. Training minimises the MSE between the sigmoid
    score and the 0/1 label; no gradients are used.

    Parameters
    ----------
    steps : int, default=20
    hidden : int, default=8
    combine : {"concat", "add", "average", "multiply"}, default="concat"
    param_bound : float, default=2.0
        Every weight is searched in ``[-param_bound, param_bound]``.
    optimizer : {"passer", "pso", "random"}, default="passer"
    pop_size, max_iter, producer_fraction, investigator_fraction,
    awareness_probability, flight_length
        Forwarded to :class:`~passerrec.optim.PLConfig`.
    threshold : float, default=0.5
        Scores at or above it are predicted positive.
    seed : int, default=0
    n_jobs : int, default=1
    """

    def __init__(self, steps=20, hidden=8, combine="concat", param_bound=2.0,
                 optimizer="passer", pop_size=30, max_iter=100, producer_fraction=0.2,
                 investigator_fraction=0.1, awareness_probability=0.8, flight_length=1.0,
                 threshold=0.5, seed=0, n_jobs=1):
        self.steps = steps
        self.hidden = hidden
        self.combine = combine
        self.param_bound = param_bound
        self.optimizer = optimizer
        self.pop_size = pop_size
        self.max_iter = max_iter
        self.producer_fraction = producer_fraction
        self.investigator_fraction = investigator_fraction
        self.awareness_probability = awareness_probability
        self.flight_length = flight_length
        self.threshold = threshold
        self.seed = seed
        self.n_jobs = n_jobs

    def fit(self, X, y):
        X, y = check_X_y(X, y, accept_sparse="csr", y_numeric=True)
        labels = np.unique(y)
        if not np.all(np.isin(labels, (0, 1))):
            raise ValueError("labels must be 0 or 1")
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        self.shape_ = ModelShape.for_features(X.shape[1], self.steps, self.hidden)
        dim = param_count(self.shape_, self.combine)
        config = PLConfig(
            (-self.param_bound, self.param_bound), dim=dim, pop_size=self.pop_size,
            max_iter=self.max_iter, producer_fraction=self.producer_fraction,
            investigator_fraction=self.investigator_fraction,
            awareness_probability=self.awareness_probability,
            flight_length=self.flight_length, seed=self.seed,
        )
        self.model_, self.result_ = train(X, y, self.shape_, self.combine, config,
                                          self.param_bound, self.optimizer, self.n_jobs)
        self.trace_ = self.result_.trace
        return self

    def decision_function(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X, accept_sparse="csr")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return MseObjective(X, np.zeros(X.shape[0]), self.shape_, self.combine).scores(
            flatten(self.model_)) if X.shape[0] else np.zeros(0)

    def predict_proba(self, X):
        p = self.decision_function(X)
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        return (self.decision_function(X) >= self.threshold).astype(int)
