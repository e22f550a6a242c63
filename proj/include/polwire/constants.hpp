#pragma once

// Unit system used throughout: energies in eV, lengths in nm, times in fs.
// Angular frequencies are energies divided by hbar (1/fs).

namespace polwire {

inline constexpr double kHbar = 0.6582119569;     // eV fs
inline constexpr double kHbarC = 197.3269804;     // eV nm
inline constexpr double kSpeedOfLight = kHbarC / kHbar;  // nm/fs

}  // namespace polwire
