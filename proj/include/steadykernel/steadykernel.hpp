#pragma once

// Umbrella header for the core library.  The CLI front end (cli.hpp) is kept
// separate because it pulls in the vendored argument and JSON parsers.

#include <steadykernel/symexpr.hpp>
#include <steadykernel/graph.hpp>
#include <steadykernel/laplacian.hpp>
#include <steadykernel/spantree.hpp>
#include <steadykernel/inverse.hpp>
#include <steadykernel/equilibrium.hpp>
#include <steadykernel/verify.hpp>
