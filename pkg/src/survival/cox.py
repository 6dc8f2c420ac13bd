"""
Cox Proportional Hazards Fitting
Dense Survival Forest Subgroup Profiler

Newton-Raphson maximization of the Breslow partial likelihood. The risk-set
ordering of a fixed set of rows is computed once in `PartialLikelihood` and
reused for every design evaluated on those rows, which is what the split
search does hundreds of times per node.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from config.settings import settings
from src.survival.concordance import concordance_index
from src.utils.errors import NoEventsError, NonIdentifiableError, NoComparablePairsError
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class CoxFit:
    """Result of a Cox partial-likelihood fit"""
    coefficients: np.ndarray
    standard_errors: np.ndarray
    z_scores: np.ndarray
    loglik_at_estimate: float
    loglik_at_zero: float
    concordance: float
    converged: bool
    iterations: int
    diagnostic: str = ""


def _reverse_cumsum(values: np.ndarray) -> np.ndarray:
    return np.cumsum(values[::-1], axis=0)[::-1]


class PartialLikelihood:
    """Breslow partial likelihood over a fixed set of (time, event) rows"""

    def __init__(self, times, events):
        times = np.asarray(times, dtype=float)
        events = np.asarray(events, dtype=bool)
        if times.ndim != 1 or times.shape != events.shape:
            raise ValueError("times and events must be 1-D arrays of equal length")

        self.n = times.shape[0]
        self.times = times
        self.events = events
        self.order = np.argsort(times, kind='mergesort')
        sorted_times = times[self.order]
        sorted_events = events[self.order]
        self.event_positions = np.flatnonzero(sorted_events)
        # Tied times share the risk set that starts at the first of them
        first_at_time = np.searchsorted(sorted_times, sorted_times, side='left')
        self.risk_start = first_at_time[self.event_positions]

    @property
    def n_events(self) -> int:
        return int(self.event_positions.size)

    def sort_design(self, design: np.ndarray) -> np.ndarray:
        return np.asarray(design, dtype=float)[self.order]

    def evaluate(self, sorted_design: np.ndarray, beta: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
        """
        Log partial likelihood, score vector and observed information at beta

        Args:
            sorted_design: Design rows in ascending time order (see sort_design)
            beta: Coefficient vector

        Returns:
            Tuple of (loglik, score, information)
        """
        X = sorted_design
        eta = X @ beta
        shift = eta.max()
        w = np.exp(eta - shift)

        s0 = _reverse_cumsum(w)[self.risk_start]
        s1 = _reverse_cumsum(w[:, None] * X)[self.risk_start]
        s2 = _reverse_cumsum(np.einsum('i,ij,ik->ijk', w, X, X))[self.risk_start]

        x_events = X[self.event_positions]
        mean = s1 / s0[:, None]
        loglik = float(np.sum(eta[self.event_positions] - shift - np.log(s0)))
        score = np.sum(x_events - mean, axis=0)
        information = np.sum(s2 / s0[:, None, None], axis=0) - mean.T @ mean
        return loglik, score, information

    def fit(self, design, max_iter: Optional[int] = None, score_tol: Optional[float] = None,
            step_tol: Optional[float] = None, with_concordance: bool = True) -> CoxFit:
        """
        Fit the Cox model for one design matrix on these rows

        Args:
            design: n x q matrix in the original row order
            max_iter: Newton iteration budget
            score_tol: Convergence bound on max |score|
            step_tol: Convergence bound on the step norm
            with_concordance: Compute the C-index of the fitted linear predictor

        Returns:
            CoxFit; converged=False with a diagnostic on monotone likelihood
        """
        max_iter = settings.COX_MAX_ITER if max_iter is None else max_iter
        score_tol = settings.COX_SCORE_TOL if score_tol is None else score_tol
        step_tol = settings.COX_STEP_TOL if step_tol is None else step_tol

        design = np.asarray(design, dtype=float)
        if design.ndim == 1:
            design = design[:, None]
        if design.shape[0] != self.n or design.shape[1] < 1:
            raise ValueError(f"design must have {self.n} rows and at least one column")
        if self.n_events == 0:
            raise NoEventsError()
        _check_identifiable(design)

        X = self.sort_design(design)
        q = X.shape[1]
        beta = np.zeros(q)
        loglik_zero, score, information = self.evaluate(X, beta)
        loglik = loglik_zero

        converged = False
        diagnostic = ""
        iterations = 0
        for iterations in range(1, max_iter + 1):
            try:
                step = np.linalg.solve(information, score)
            except np.linalg.LinAlgError:
                if iterations == 1:
                    raise NonIdentifiableError()
                diagnostic = "singular information matrix"
                break
            if not np.all(np.isfinite(step)):
                diagnostic = "non-finite Newton step"
                break

            # Step halving on likelihood decrease
            candidate = beta + step
            new_loglik, new_score, new_information = self.evaluate(X, candidate)
            halvings = 0
            while new_loglik < loglik - 1e-12 and halvings < settings.COX_MAX_HALVINGS:
                step = step / 2.0
                candidate = beta + step
                new_loglik, new_score, new_information = self.evaluate(X, candidate)
                halvings += 1

            beta, loglik, score, information = candidate, new_loglik, new_score, new_information

            if np.max(np.abs(beta)) > settings.COX_DIVERGENCE_BOUND:
                diagnostic = "monotone likelihood: coefficient diverging"
                break
            if np.max(np.abs(score)) < score_tol and np.linalg.norm(step) < step_tol:
                converged = True
                break
        else:
            diagnostic = f"no convergence within {max_iter} iterations"

        standard_errors = _standard_errors(information)
        with np.errstate(divide='ignore', invalid='ignore'):
            z_scores = np.where(standard_errors > 0, beta / standard_errors, np.nan)

        concordance = np.nan
        if with_concordance:
            try:
                concordance = concordance_index(design @ beta, self.times, self.events)
            except NoComparablePairsError:
                concordance = 0.5
                diagnostic = diagnostic or "no comparable pairs for concordance"

        if diagnostic:
            logger.debug(f"Cox fit diagnostic: {diagnostic}")

        return CoxFit(
            coefficients=beta,
            standard_errors=standard_errors,
            z_scores=z_scores,
            loglik_at_estimate=loglik,
            loglik_at_zero=loglik_zero,
            concordance=concordance,
            converged=converged,
            iterations=iterations,
            diagnostic=diagnostic,
        )


def _check_identifiable(design: np.ndarray):
    """Constant or collinear columns cannot be separated from the baseline hazard"""
    if np.any(np.ptp(design, axis=0) == 0):
        raise NonIdentifiableError()
    centered = design - design.mean(axis=0)
    if np.linalg.matrix_rank(centered) < design.shape[1]:
        raise NonIdentifiableError()


def _standard_errors(information: np.ndarray) -> np.ndarray:
    try:
        covariance = np.linalg.inv(information)
    except np.linalg.LinAlgError:
        return np.full(information.shape[0], np.nan)
    variances = np.diag(covariance)
    return np.sqrt(np.where(variances > 0, variances, np.nan))


def cox_fit(times, events, design, **kwargs) -> CoxFit:
    """
    Fit a Cox proportional hazards model with Breslow ties

    Args:
        times: Observed times
        events: Event indicators
        design: n x q covariate matrix
        **kwargs: Passed to PartialLikelihood.fit

    Returns:
        CoxFit
    """
    return PartialLikelihood(times, events).fit(design, **kwargs)


def partial_loglik(times, events, design, beta) -> float:
    """Breslow log partial likelihood at a given coefficient vector"""
    likelihood = PartialLikelihood(times, events)
    design = np.asarray(design, dtype=float)
    if design.ndim == 1:
        design = design[:, None]
    loglik, _, _ = likelihood.evaluate(likelihood.sort_design(design), np.atleast_1d(np.asarray(beta, dtype=float)))
    return loglik
