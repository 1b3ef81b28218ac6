#ifndef MODLAB_MODLAB_HPP
#define MODLAB_MODLAB_HPP

// Umbrella header: conformal modulus laboratory on discrete metric measure
// spaces. Modulus of curve families by constraint-generation convex
// optimization, with the geometric experiments built on top of it.

#include "modlab/ahlfors.hpp"
#include "modlab/generators.hpp"
#include "modlab/geometry_lab.hpp"
#include "modlab/graph_io.hpp"
#include "modlab/metric_graph.hpp"
#include "modlab/modulus.hpp"
#include "modlab/parallel.hpp"
#include "modlab/poincare.hpp"
#include "modlab/porosity.hpp"
#include "modlab/rng.hpp"
#include "modlab/selectors.hpp"
#include "modlab/shortest_paths.hpp"

#endif  // MODLAB_MODLAB_HPP
