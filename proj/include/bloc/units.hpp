#pragma once

#include <string>

namespace bloc::units {

// 1 hartree expressed in wavenumbers.
inline constexpr double hartree_cm = 219474.6313632;
// 1 atomic unit of time expressed in femtoseconds.
inline constexpr double au_time_fs = 0.02418884254;

enum class Unit { Wavenumber, Hartree, Femtosecond, AtomicTime, Nanometer };

Unit parse_unit(const std::string& name);
std::string unit_name(Unit u);

// Converts between the supported unit pairs (cm^-1 <-> hartree,
// fs <-> a.u. time, nm <-> cm^-1). Throws std::invalid_argument for an
// unsupported pair.
double convert(double value, Unit from, Unit to);

inline double cm_to_hartree(double cm) { return cm / hartree_cm; }
inline double hartree_to_cm(double eh) { return eh * hartree_cm; }
inline double fs_to_au(double fs) { return fs / au_time_fs; }
inline double au_to_fs(double au) { return au * au_time_fs; }

} // namespace bloc::units
