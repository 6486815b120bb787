#include "bloc/units.hpp"

#include <stdexcept>

namespace bloc::units {

Unit parse_unit(const std::string& name) {
  if (name == "cm-1" || name == "cm^-1" || name == "wavenumber") return Unit::Wavenumber;
  if (name == "hartree" || name == "au_energy") return Unit::Hartree;
  if (name == "fs") return Unit::Femtosecond;
  if (name == "au" || name == "au_time") return Unit::AtomicTime;
  if (name == "nm") return Unit::Nanometer;
  throw std::invalid_argument("unknown unit: " + name);
}

std::string unit_name(Unit u) {
  switch (u) {
    case Unit::Wavenumber: return "cm-1";
    case Unit::Hartree: return "hartree";
    case Unit::Femtosecond: return "fs";
    case Unit::AtomicTime: return "au_time";
    case Unit::Nanometer: return "nm";
  }
  return "?";
}

double convert(double value, Unit from, Unit to) {
  if (from == to) return value;
  if (from == Unit::Wavenumber && to == Unit::Hartree) return value / hartree_cm;
  if (from == Unit::Hartree && to == Unit::Wavenumber) return value * hartree_cm;
  if (from == Unit::Femtosecond && to == Unit::AtomicTime) return value / au_time_fs;
  if (from == Unit::AtomicTime && to == Unit::Femtosecond) return value * au_time_fs;
  if (from == Unit::Nanometer && to == Unit::Wavenumber) return 1e7 / value;
  if (from == Unit::Wavenumber && to == Unit::Nanometer) return 1e7 / value;
  throw std::invalid_argument("unsupported unit conversion: " + unit_name(from) +
                              " -> " + unit_name(to));
}

} // namespace bloc::units
