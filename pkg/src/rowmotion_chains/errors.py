"""Exception hierarchy. Every error carries a stable machine-readable code."""


class RowchainError(Exception):
    code = "error"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details

    def to_json(self):
        out = {"error": self.code, "message": str(self)}
        if self.details:
            out["details"] = {k: _jsonable(v) for k, v in self.details.items()}
        return out


def _jsonable(v):
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    if isinstance(v, (list, tuple, set, frozenset)):
        return [_jsonable(x) for x in v]
    return str(v)


class CycleDetected(RowchainError):
    code = "cycle_detected"


class DuplicateLabel(RowchainError):
    code = "duplicate_label"


class UnknownLabel(RowchainError):
    code = "unknown_label"


class LimitExceeded(RowchainError):
    code = "limit_exceeded"


class NotALattice(RowchainError):
    code = "not_a_lattice"


class InvalidSize(RowchainError):
    code = "invalid_size"


class NotComparable(RowchainError):
    code = "not_comparable"


class LabelNotUnique(RowchainError):
    code = "label_not_unique"


class NotBijective(RowchainError):
    code = "not_bijective"


class NotSemidistrim(RowchainError):
    code = "not_semidistrim"


class NotInFamily(RowchainError):
    code = "not_in_family"


class NotIrreducible(RowchainError):
    code = "not_irreducible"


class DimensionMismatch(RowchainError):
    code = "dimension_mismatch"


class InvalidProbability(RowchainError):
    code = "invalid_probability"


class InvalidC(RowchainError):
    code = "invalid_c"


class SpectrumMismatch(RowchainError):
    code = "spectrum_mismatch"


class MomentMismatch(RowchainError):
    code = "moment_mismatch"


class InvalidChain(RowchainError):
    code = "invalid_chain"


class InvalidInput(RowchainError):
    code = "invalid_input"
