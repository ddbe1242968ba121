#ifndef NTSYM_NTSYM_HPP
#define NTSYM_NTSYM_HPP

#include "bernoulli.hpp"
#include "errors.hpp"
#include "expansive.hpp"
#include "periodic.hpp"
#include "potentials.hpp"
#include "pressure.hpp"
#include "seqspace.hpp"

#endif  // NTSYM_NTSYM_HPP
