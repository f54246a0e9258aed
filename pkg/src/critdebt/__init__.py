"""Critical debt levels of a portfolio via a parastatistics analogy.

Debts are normalized into dimensionless slot values (``portfolio``), fitted
to an intermediate-statistics occupation law (``parastat``), and compared
with the critical total debt beyond which the book cannot be serviced
(``critical``, ``fractional``, ``mix``).
"""

from .critical import Verdict, critical_report, critical_sigma_chempot, critical_sigma_entropy
from .errors import CritDebtError, ModelWarning
from .parastat import ParastatParams, fit_params, solve_sigma
from .portfolio import DebtRecord, normalize, read_debts_csv
from .solvers import SolveConfig

__all__ = [
    "CritDebtError", "DebtRecord", "ModelWarning", "ParastatParams", "SolveConfig", "Verdict",
    "critical_report", "critical_sigma_chempot", "critical_sigma_entropy", "fit_params",
    "normalize", "read_debts_csv", "solve_sigma",
]
__version__ = "0.1.0"
