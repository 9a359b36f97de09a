#ifndef FVKIT_FVKIT_HPP
#define FVKIT_FVKIT_HPP

#include "fvkit/error.hpp"
#include "fvkit/fv.hpp"
#include "fvkit/fv_conditions.hpp"
#include "fvkit/logic.hpp"
#include "fvkit/parser.hpp"
#include "fvkit/set_algebra.hpp"
#include "fvkit/set_eval.hpp"
#include "fvkit/set_syntax.hpp"
#include "fvkit/skolem.hpp"
#include "fvkit/witness.hpp"

#endif
