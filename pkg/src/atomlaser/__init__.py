"""Atom-laser cavity output coupling: exact, Born-Markov and Born-only dynamics."""
from .errors import AtomLaserError
from .exact import (
    AmplitudeTrajectory,
    TimeGrid,
    atom_number_exact,
    broadband_closed_form,
    expected_adag,
    solve_amplitude,
)
from .master import (
    MarkovConstant,
    born_adag_nonmarkov,
    born_markov_adag,
    born_markov_number,
    born_number_nonmarkov,
    markov_constant,
)
from .model import (
    Broadband,
    Gaussian,
    KernelSpec,
    PhotonDelta,
    PhysicalConstants,
    SystemParams,
    kernel_eval,
    kernel_integral,
)
from .series import SeriesTable, compare_series
from .timescales import TimescaleReport, validity_report
from .volterra import BACKEND

__version__ = "0.1.0"
