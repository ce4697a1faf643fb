#ifndef PICKWELL_PICKWELL_HPP
#define PICKWELL_PICKWELL_HPP

#include <pickwell/error.hpp>
#include <pickwell/numkernel.hpp>
#include <pickwell/cpmap.hpp>
#include <pickwell/superharmonic.hpp>
#include <pickwell/funcalc.hpp>
#include <pickwell/pickclassic.hpp>
#include <pickwell/lyapunov.hpp>
#include <pickwell/random.hpp>
#include <pickwell/instancekit.hpp>
#include <pickwell/serialize.hpp>

#endif // PICKWELL_PICKWELL_HPP
