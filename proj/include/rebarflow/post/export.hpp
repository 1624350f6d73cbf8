#pragma once

#include <iosfwd>
#include <string>

#include "rebarflow/post/fields.hpp"

namespace rebarflow::post {

/// Legacy VTK ASCII unstructured grid with quadratic triangles (cell type 22).
/// Point data: velocity (u in the fluid, ubar in the block), pressure
/// likewise; cell data: region (0 fluid, 1 Darcy).
void write_vtk(std::ostream& out, const FieldSet& fields, const std::string& title = "rebarflow");
void write_vtk(const std::string& path, const FieldSet& fields);

}  // namespace rebarflow::post
