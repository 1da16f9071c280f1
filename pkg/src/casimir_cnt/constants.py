"""Physical constants (CODATA 2018, SI) and derived unit helpers."""

import math

HBAR = 1.054_571_817e-34  # J s
C = 299_792_458.0  # m/s
KB = 1.380_649e-23  # J/K
E_CHARGE = 1.602_176_634e-19  # C
EPS0 = 8.854_187_8128e-12  # F/m
M_E = 9.109_383_7015e-31  # kg
ALPHA = 7.297_352_5693e-3  # fine-structure constant
EULER_GAMMA = 0.577_215_664_901_532_9
ZETA3 = 1.202_056_903_159_594_3

EV = E_CHARGE  # J per eV
NM = 1e-9

# C-C bond length of graphene
BOND_LENGTH = 0.142 * NM

# graphene sheet conductivity scale alpha*c/4, expressed as the dimensionless 2*pi*sigma/c
SIGMA0_REDUCED = 2.0 * math.pi * ALPHA / 4.0


def hbar_omega_to_rad(energy_ev):
    """Angular frequency (rad/s) of a photon energy in eV."""
    return energy_ev * EV / HBAR


def rad_to_ev(omega):
    return omega * HBAR / EV


def matsubara_frequency(n, temperature):
    """xi_n = 2 pi n k_B T / hbar in rad/s."""
    return 2.0 * math.pi * n * KB * temperature / HBAR


def casimir_ideal_energy(separation):
    """E_M = -pi^2 hbar c / (720 D^3), J/m^2 for D in metres."""
    return -math.pi**2 * HBAR * C / (720.0 * separation**3)


def thermal_energy_closed_form(separation, temperature):
    """E_T = -zeta(3) k_B T / (16 pi D^2), J/m^2."""
    return -ZETA3 * KB * temperature / (16.0 * math.pi * separation**2)
