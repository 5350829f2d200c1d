"""
Check classes: each one knows which weavings it applies to and turns a
trial batch (weaving, stack of test vectors, duals) into record batches
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np

from config import EQ_TOL, INEQ_TOL, PARSEVAL_TOL, TIGHT_TOL
from frames.weaving import WeavingContext
from identities.base import AltDualContext, RecordBatch
from identities.lemmas import commuting_pair_batch, normalized_lemma_batches
from identities.weaving_bounds import (
    WeavingSums, weaving_sums, parseval_weaving_batch, general_weaving_batch,
    sandwich_batch, double_batch, tight_chain_batch
)
from identities.dual_bounds import altdual_re_batch, altdual_complex_batch, altdual_weighted_batch

logger = logging.getLogger(__name__)


@dataclass
class TrialBatch:
    """All trials of one partition: row j of vectors is trial j"""
    ctx: WeavingContext
    vectors: np.ndarray
    duals: List[Tuple[str, AltDualContext]] = field(default_factory=list)
    weighted: Optional[AltDualContext] = None
    check_dual: bool = True
    eq_tol: float = EQ_TOL
    ineq_tol: float = INEQ_TOL

    @cached_property
    def sums(self) -> WeavingSums:
        # lambda-free, shared by every grid value
        return weaving_sums(self.ctx, self.vectors)


class BaseCheck(ABC):
    """Base class for all identity checks"""

    theorem_id = ''
    uses_lambda = False

    def __init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)

    @abstractmethod
    def can_check(self, ctx: WeavingContext) -> bool:
        """Check whether the hypotheses of this identity hold for the weaving"""
        pass

    @abstractmethod
    def run(self, trials: TrialBatch, lam: Optional[float] = None) -> List[RecordBatch]:
        """
        Evaluate the identity at every trial vector of a partition

        Args:
            trials: Weaving, test vectors and duals
            lam: Grid value for identities with a real parameter, else None

        Returns:
            One batch per identity evaluated (several for the dual checks)
        """
        pass


class LemmaCheck(BaseCheck):
    """The P/Q lemmas on the normalized pair of the weaving"""

    theorem_id = 'quadratic_bound'
    uses_lambda = True

    def can_check(self, ctx: WeavingContext) -> bool:
        return True

    def run(self, trials: TrialBatch, lam: Optional[float] = None) -> List[RecordBatch]:
        return normalized_lemma_batches(trials.ctx, trials.vectors, lam, trials.eq_tol, trials.ineq_tol)


class OperatorIdentityCheck(BaseCheck):
    theorem_id = 'operator_identity'

    def can_check(self, ctx: WeavingContext) -> bool:
        return True

    def run(self, trials: TrialBatch, lam: Optional[float] = None) -> List[RecordBatch]:
        return normalized_lemma_batches(trials.ctx, trials.vectors, None, trials.eq_tol, trials.ineq_tol)


class CommutingPairCheck(BaseCheck):
    theorem_id = 'commuting_pair'

    def can_check(self, ctx: WeavingContext) -> bool:
        return True

    def run(self, trials: TrialBatch, lam: Optional[float] = None) -> List[RecordBatch]:
        return [commuting_pair_batch(trials.ctx, trials.vectors, trials.eq_tol, trials.ineq_tol)]


class ParsevalWeavingCheck(BaseCheck):
    """Only for weavings with S_W = I"""

    theorem_id = 'parseval_weaving'

    def can_check(self, ctx: WeavingContext) -> bool:
        return ctx.is_parseval(PARSEVAL_TOL)

    def run(self, trials: TrialBatch, lam: Optional[float] = None) -> List[RecordBatch]:
        return [parseval_weaving_batch(trials.ctx, trials.sums, trials.eq_tol, trials.ineq_tol)]


class GeneralWeavingCheck(BaseCheck):
    theorem_id = 'general_weaving'
    uses_lambda = True

    def can_check(self, ctx: WeavingContext) -> bool:
        return True

    def run(self, trials: TrialBatch, lam: Optional[float] = None) -> List[RecordBatch]:
        return [general_weaving_batch(trials.ctx, trials.sums, lam, trials.eq_tol, trials.ineq_tol)]


class SandwichCheck(BaseCheck):
    theorem_id = 'sandwich'
    uses_lambda = True

    def can_check(self, ctx: WeavingContext) -> bool:
        return True

    def run(self, trials: TrialBatch, lam: Optional[float] = None) -> List[RecordBatch]:
        return [sandwich_batch(trials.ctx, trials.sums, lam, trials.ineq_tol)]


class DoubleCheck(BaseCheck):
    theorem_id = 'double'
    uses_lambda = True

    def can_check(self, ctx: WeavingContext) -> bool:
        return True

    def run(self, trials: TrialBatch, lam: Optional[float] = None) -> List[RecordBatch]:
        return [double_batch(trials.ctx, trials.sums, lam, trials.ineq_tol)]


class TightChainCheck(BaseCheck):
    """Only for weavings with S_W = A I"""

    theorem_id = 'tight_chain'
    uses_lambda = True

    def can_check(self, ctx: WeavingContext) -> bool:
        tight, _ = ctx.tightness(TIGHT_TOL)
        return tight

    def run(self, trials: TrialBatch, lam: Optional[float] = None) -> List[RecordBatch]:
        return [tight_chain_batch(trials.ctx, trials.sums, lam, ineq_tol=trials.ineq_tol)]


class _DualCheck(BaseCheck):

    def can_check(self, ctx: WeavingContext) -> bool:
        return True

    def _label(self, batch: RecordBatch, label: str) -> RecordBatch:
        batch.label = label
        return batch


class AltDualRealCheck(_DualCheck):
    theorem_id = 'altdual_real'
    uses_lambda = True

    def run(self, trials: TrialBatch, lam: Optional[float] = None) -> List[RecordBatch]:
        return [
            self._label(altdual_re_batch(adc, trials.vectors, lam, trials.eq_tol, trials.ineq_tol,
                                         check_dual=trials.check_dual), label)
            for label, adc in trials.duals
        ]


class AltDualComplexCheck(_DualCheck):
    theorem_id = 'altdual_complex'

    def run(self, trials: TrialBatch, lam: Optional[float] = None) -> List[RecordBatch]:
        return [
            self._label(altdual_complex_batch(adc, trials.vectors, trials.eq_tol,
                                              check_dual=trials.check_dual), label)
            for label, adc in trials.duals
        ]


class AltDualWeightedCheck(_DualCheck):
    theorem_id = 'altdual_weighted'

    def run(self, trials: TrialBatch, lam: Optional[float] = None) -> List[RecordBatch]:
        if trials.weighted is None:
            return []
        batch = altdual_weighted_batch(trials.weighted, trials.vectors, trials.eq_tol,
                                       check_dual=trials.check_dual)
        return [self._label(batch, 'weighted')]


def default_checks() -> List[BaseCheck]:
    """Every check, in report order"""
    return [
        OperatorIdentityCheck(),
        LemmaCheck(),
        CommutingPairCheck(),
        ParsevalWeavingCheck(),
        GeneralWeavingCheck(),
        SandwichCheck(),
        DoubleCheck(),
        TightChainCheck(),
        AltDualRealCheck(),
        AltDualComplexCheck(),
        AltDualWeightedCheck(),
    ]
