#ifndef FPL_VERSION_HPP
#define FPL_VERSION_HPP

#define FPL_VERSION "0.1.0"

#endif
