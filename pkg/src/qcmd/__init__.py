"""Quantum-classical molecular dynamics on a periodic grid.

A coupled Schroedinger--Newton system is propagated with a second-order
split-step scheme; the matching classical limit flow, Wigner/Husimi
phase-space representations and observable expectations support
convergence experiments over the time step and the semiclassical
parameter h.
"""

__version__ = "0.1.0"

from .grid import (Grid, WaveFunction, fourier_modes, make_grid, mass,
                   normalize, quadrature)
from .potentials import (Potential, builtin_harmonic, builtin_sin_quadratic,
                         builtin_zero, ehrenfest_potential_gradient,
                         get_potential)
from .propagator import (NuclearState, QCMDState, evolve, kinetic_step,
                         lie_step, potential_step, strang_step)
from .classical import (ClassicalPoint, classical_hamiltonian, flow_T, flow_V,
                        jacobian_of_flow, reference_flow, stormer_verlet_run,
                        stormer_verlet_step)
from .observables import (Observable, builtin_observables, classical_pullback,
                          expectation, get_observable)
from .phase_space import (CoherentState, PhaseSpaceField, husimi_box,
                          husimi_expectation, husimi_function, load_field,
                          save_field, wigner_expectation, wigner_transform)
from .experiments import (ErrorRecord, RunConfig, SlopeFit, envelope_lattice,
                          fit_loglog, initial_state, min_error_envelope,
                          read_records_csv, run_final_state, sweep_dt, sweep_h,
                          write_manifest, write_records_csv)
from .egorov import (EgorovReport, egorov_defect, egorov_sweep,
                     splitting_identity_check, splitting_sweep)
