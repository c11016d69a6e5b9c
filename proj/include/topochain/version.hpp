#ifndef TOPOCHAIN_VERSION_HPP
#define TOPOCHAIN_VERSION_HPP

namespace topochain {

inline constexpr const char* kVersion = "0.1.0";

}

#endif
