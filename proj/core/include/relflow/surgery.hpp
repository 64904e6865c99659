#pragma once

#include "relflow/surface.hpp"
#include "relflow/tracing.hpp"

namespace relflow {

// Cross-glues two surfaces along a straight slit with holonomy v. Each slit
// starts at an order-0 marked point and must embed without meeting cone
// points. The two slit copies become a pair of homologous saddle
// connections between the two new zeros; genus and area add. Labels of the
// result: surviving points of s1 in order, then s2's, then the slit tail
// (the new zero at the marked points) and the slit tip.
FlatSurfaceQ slit_glue(const FlatSurfaceQ& s1, int label1, const FlatSurfaceQ& s2,
                       int label2, const Vec2<Rational>& v,
                       const TraceBudget& budget = {});

// Product-neighborhood chart at a regular point of an infinite core face:
// the glued surface's absolute periods are exactly the union of the two
// components'; only relative periods move with gamma.
FlatSurfaceQ coreface_chart(const FlatSurfaceQ& comp1, int label1,
                            const FlatSurfaceQ& comp2, int label2,
                            const Vec2<Rational>& gamma, const TraceBudget& budget = {});

// Removes an order-0 marked point by retriangulating its star; the flat
// surface is unchanged. Remaining labels keep their relative order.
FlatSurfaceQ remove_marked_point(const FlatSurfaceQ& s, int label);

}  // namespace relflow
