"""Exception hierarchy.

Every domain failure carries a short machine-readable ``code`` that the
command line prints and maps to exit status 1.
"""


class DomainError(Exception):
    code = "domain-error"


class DegenerateInput(DomainError):
    code = "degenerate-input"


class NotInMinusComponent(DomainError):
    code = "not-in-minus-component"


class ClassificationAmbiguous(DomainError):
    code = "classification-ambiguous"


class EmptyFiber(DomainError):
    code = "empty-fiber"


class TraceMinusTwo(DomainError):
    code = "trace-minus-two"


class RelatorViolated(DomainError):
    code = "relator-violated"


class SamplingExhausted(DomainError):
    code = "sampling-exhausted"


class PerturbationFailed(DomainError):
    code = "perturbation-failed"


class RankDrop(DomainError):
    code = "rank-drop"


class StepUnderflow(DomainError):
    code = "step-underflow"


class JordanTypeChange(DomainError):
    code = "jordan-type-change"


class StabilizerJoinFailed(DomainError):
    code = "stabilizer-join-failed"


class InvariantMismatch(DomainError):
    code = "invariant-mismatch"


class BudgetExceeded(DomainError):
    code = "budget-exceeded"
