#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "maketex/backproject.hpp"
#include "maketex/cli.hpp"
#include "maketex/error.hpp"
#include "maketex/generator.hpp"
#include "maketex/mesh.hpp"
#include "maketex/pipeline.hpp"
#include "maketex/raster.hpp"
#include "maketex/shapes.hpp"
#include "maketex/viewsel.hpp"

namespace py = pybind11;
using namespace maketex;

namespace {

// H x W x C float32 copy.
py::array_t<float> to_numpy(const ImageF& img) {
  py::array_t<float> out({img.height(), img.width(), img.channels()});
  std::copy(img.values().begin(), img.values().end(), out.mutable_data());
  return out;
}

py::array_t<bool> to_numpy(const Mask& m) {
  py::array_t<bool> out({m.height(), m.width()});
  bool* dst = out.mutable_data();
  for (std::size_t i = 0; i < m.pixel_count(); ++i) dst[i] = m[i] != 0;
  return out;
}

py::array_t<bool> to_numpy(const TextureMask& m) {
  py::array_t<bool> out({m.resolution, m.resolution});
  bool* dst = out.mutable_data();
  for (std::size_t t = 0; t < m.bits.size(); ++t) dst[t] = m.bits[t] != 0;
  return out;
}

ImageF image_from(const py::array_t<float, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 && a.ndim() != 3) throw Error(Errc::InvalidArgument, "image must be H x W or H x W x C");
  const int h = static_cast<int>(a.shape(0));
  const int w = static_cast<int>(a.shape(1));
  const int c = a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1;
  ImageF img(w, h, c);
  std::copy(a.data(), a.data() + a.size(), img.values().begin());
  return img;
}

Mask mask_from(const py::array_t<bool, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw Error(Errc::InvalidArgument, "mask must be H x W");
  Mask m(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.size(); ++i) m[static_cast<std::size_t>(i)] = a.data()[i] ? 1 : 0;
  return m;
}

MockKind mock_kind(const std::string& name) {
  if (name == "flat") return MockKind::Flat;
  if (name == "depthshade") return MockKind::DepthShade;
  if (name == "checker") return MockKind::Checker;
  if (name == "identity") return MockKind::Identity;
  throw Error(Errc::InvalidArgument, "unknown mock '" + name + "'");
}

py::dict result_dict(const PipelineResult& r) {
  py::dict d;
  d["texture"] = to_numpy(r.texture);
  d["prefill_texture"] = to_numpy(r.prefill_texture);
  d["textured"] = to_numpy(r.textured);
  d["painted"] = to_numpy(r.accum.textured_mask());
  d["prefill_coverage"] = r.prefill_coverage;
  d["final_coverage"] = r.final_coverage;
  py::list stages;
  for (const auto& s : r.stages) stages.append(py::module_::import("json").attr("loads")(to_json(s).dump()));
  d["stages"] = stages;
  return d;
}

}  // namespace

PYBIND11_MODULE(_maketex, m) {
  m.doc() = "Texture baking from generated views";

  // Kept for the life of the interpreter; the exception carries the error code name.
  static PyObject* error_type = PyErr_NewException("maketex._maketex.MaketexError", PyExc_RuntimeError, nullptr);
  m.add_object("MaketexError", py::handle(error_type));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  py::class_<TriMesh>(m, "TriMesh")
      .def_property_readonly("num_faces", &TriMesh::num_faces)
      .def_property_readonly("num_vertices", [](const TriMesh& t) { return t.positions.size(); })
      .def_readonly("dropped_degenerate", &TriMesh::dropped_degenerate)
      .def("positions", [](const TriMesh& t) {
        py::array_t<double> out({static_cast<py::ssize_t>(t.positions.size()), py::ssize_t{3}});
        double* dst = out.mutable_data();
        for (const auto& p : t.positions) dst = std::copy(p.data(), p.data() + 3, dst);
        return out;
      })
      .def("faces", [](const TriMesh& t) {
        py::array_t<std::uint32_t> out({static_cast<py::ssize_t>(t.faces.size()), py::ssize_t{3}});
        std::uint32_t* dst = out.mutable_data();
        for (const auto& f : t.faces) dst = std::copy(f.begin(), f.end(), dst);
        return out;
      });

  m.def("load_mesh", &load_mesh, py::arg("path"));
  m.def("parse_obj", [](const std::string& text) {
    std::istringstream in(text);
    return parse_obj(in);
  });
  m.def("save_obj", &save_obj, py::arg("mesh"), py::arg("path"), py::arg("texture_file") = std::nullopt);
  m.def("normalize", [](const TriMesh& t) { return normalize(t).first; });

  auto shapes_mod = m.def_submodule("shapes", "Procedural test meshes");
  shapes_mod.def("quad", &shapes::quad, py::arg("half_size") = 1.0, py::arg("z") = 0.0);
  shapes_mod.def("cube", &shapes::cube, py::arg("half_size") = 1.0);
  shapes_mod.def("uv_sphere", &shapes::uv_sphere, py::arg("segments") = 64, py::arg("rings") = 32,
                 py::arg("radius") = 1.0);
  shapes_mod.def("cube_sphere", &shapes::cube_sphere, py::arg("subdivisions") = 16, py::arg("radius") = 1.0);
  shapes_mod.def("open_cylinder", &shapes::open_cylinder, py::arg("segments") = 64, py::arg("height_segments") = 8,
                 py::arg("radius") = 0.5, py::arg("height") = 1.6);
  shapes_mod.def("torus", [] { return shapes::torus(); });

  py::class_<CameraPose>(m, "CameraPose")
      .def(py::init([](double az, double el, double radius, double half_extent, int size) {
             CameraPose p;
             p.azimuth = az;
             p.elevation = el;
             p.radius = radius;
             p.ortho_half_extent = half_extent;
             p.image_size = size;
             return p;
           }),
           py::arg("azimuth") = 0.0, py::arg("elevation") = 0.0, py::arg("radius") = kDefaultRadius,
           py::arg("ortho_half_extent") = kDefaultHalfExtent, py::arg("image_size") = 1024)
      .def_readwrite("azimuth", &CameraPose::azimuth)
      .def_readwrite("elevation", &CameraPose::elevation)
      .def_readwrite("radius", &CameraPose::radius)
      .def_readwrite("ortho_half_extent", &CameraPose::ortho_half_extent)
      .def_readwrite("image_size", &CameraPose::image_size)
      .def_property_readonly("label", [](const CameraPose& p) { return std::string(to_string(view_label(p))); })
      .def("direction", [](const CameraPose& p) {
        const Eigen::Vector3d d = p.direction();
        return std::array<double, 3>{d.x(), d.y(), d.z()};
      });

  m.def("fibonacci_lattice", &fibonacci_lattice, py::arg("n"), py::arg("radius") = kDefaultRadius,
        py::arg("ortho_half_extent") = kDefaultHalfExtent, py::arg("image_size") = 1024);
  m.def("front_back_pair", &front_back_pair, py::arg("radius") = kDefaultRadius,
        py::arg("ortho_half_extent") = kDefaultHalfExtent, py::arg("image_size") = 1024);

  py::class_<FragmentBuffer>(m, "FragmentBuffer")
      .def_readonly("width", &FragmentBuffer::width)
      .def_readonly("height", &FragmentBuffer::height)
      .def("foreground", [](const FragmentBuffer& f) { return to_numpy(f.foreground_mask()); })
      .def("face_id", [](const FragmentBuffer& f) {
        py::array_t<std::int64_t> out({f.height, f.width});
        for (std::size_t i = 0; i < f.size(); ++i) {
          out.mutable_data()[i] = f.foreground(i) ? static_cast<std::int64_t>(f.face_id[i]) : -1;
        }
        return out;
      })
      .def("depth", [](const FragmentBuffer& f) {
        py::array_t<float> out({f.height, f.width});
        std::copy(f.depth.begin(), f.depth.end(), out.mutable_data());
        return out;
      })
      .def("uv", [](const FragmentBuffer& f) {
        py::array_t<float> out({f.height, f.width, 2});
        float* dst = out.mutable_data();
        for (const auto& uv : f.uv) dst = std::copy(uv.begin(), uv.end(), dst);
        return out;
      });

  m.def("rasterize", &rasterize, py::arg("mesh"), py::arg("pose"), py::arg("cull_backfaces") = true);
  m.def("render_depth", [](const FragmentBuffer& f) { return to_numpy(render_depth(f).normalized()); });
  m.def("internal_face_mask", [](const TriMesh& mesh, const CameraPose& pose, double eps) {
    const ViewRender v = render_view(mesh, pose);
    return to_numpy(internal_face_mask(v.depth_culled, v.depth_nocull, eps));
  }, py::arg("mesh"), py::arg("pose"), py::arg("eps") = 1e-3);
  m.def("frontal_filter_mask", [](const FragmentBuffer& f, const CameraPose& pose, double tau) {
    return to_numpy(frontal_filter_mask(normals_from_depth(render_depth(f), pose), tau));
  }, py::arg("frag"), py::arg("pose"), py::arg("tau_keep") = 0.3);

  py::class_<UvTexture>(m, "UvTexture")
      .def(py::init<int>(), py::arg("resolution"))
      .def_readonly("resolution", &UvTexture::resolution)
      .def("total_weight", &UvTexture::total_weight)
      .def("weights", [](const UvTexture& t) {
        py::array_t<double> out({t.resolution, t.resolution});
        std::copy(t.weight_accum.begin(), t.weight_accum.end(), out.mutable_data());
        return out;
      })
      .def("textured_mask", [](const UvTexture& t) { return to_numpy(t.textured_mask()); })
      .def("commit", [](const UvTexture& t) { return to_numpy(commit(t)); });

  m.def("splat", [](py::array_t<float, py::array::c_style | py::array::forcecast> image, const FragmentBuffer& frag,
                    std::optional<py::array_t<bool, py::array::c_style | py::array::forcecast>> reject,
                    UvTexture& tex) {
    const Mask rej = reject ? mask_from(*reject) : Mask(frag.width, frag.height);
    return to_numpy(splat(image_from(image), frag, rej, tex));
  }, py::arg("image"), py::arg("frag"), py::arg("reject"), py::arg("texture"));

  m.def("selection_order", [](const TriMesh& mesh, int n_candidates, int max_views, int image_size,
                              int texture_size) {
    SelectionSettings s;
    s.image_size = image_size;
    s.texture_size = texture_size;
    return selection_order(mesh, n_candidates, max_views, s);
  }, py::arg("mesh"), py::arg("n_candidates"), py::arg("max_views"), py::arg("image_size") = 1024,
        py::arg("texture_size") = 1024);

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_readwrite("texture_size", &PipelineConfig::texture_size)
      .def_readwrite("render_size", &PipelineConfig::render_size)
      .def_readwrite("gen_size", &PipelineConfig::gen_size)
      .def_readwrite("n_views", &PipelineConfig::n_views)
      .def_readwrite("n_candidates", &PipelineConfig::n_candidates)
      .def_readwrite("tau_keep", &PipelineConfig::tau_keep)
      .def_readwrite("depth_diff_eps", &PipelineConfig::depth_diff_eps)
      .def_readwrite("coverage_stop", &PipelineConfig::coverage_stop)
      .def_readwrite("seed", &PipelineConfig::seed)
      .def_readwrite("frontal_filter", &PipelineConfig::frontal_filter)
      .def_readwrite("internal_mask", &PipelineConfig::internal_mask)
      .def("validate", &PipelineConfig::validate);

  m.def("texture_mesh", [](const TriMesh& mesh, const std::string& prompt, const PipelineConfig& cfg,
                           const std::string& generator) {
    const auto gen = make_generator(generator);
    PipelineResult r;
    {
      py::gil_scoped_release release;
      r = texture_mesh(mesh, prompt, cfg, *gen);
    }
    return result_dict(r);
  }, py::arg("mesh"), py::arg("prompt"), py::arg("config") = PipelineConfig{}, py::arg("generator") = "mock:flat");

  m.def("enhance_texture", [](const TriMesh& mesh, py::array_t<float, py::array::c_style | py::array::forcecast> lq,
                              const std::string& prompt, double strength, const PipelineConfig& cfg,
                              const std::string& generator) {
    const auto gen = make_generator(generator);
    const ImageF lq_img = image_from(lq);
    PipelineResult r;
    {
      py::gil_scoped_release release;
      r = enhance_texture(mesh, lq_img, prompt, strength, cfg, *gen);
    }
    return result_dict(r);
  }, py::arg("mesh"), py::arg("lq_texture"), py::arg("prompt"), py::arg("strength"),
        py::arg("config") = PipelineConfig{}, py::arg("generator") = "mock:flat");

  m.def("mock_generate", [](const std::string& kind, py::array_t<float, py::array::c_style | py::array::forcecast> depth,
                            py::array_t<bool, py::array::c_style | py::array::forcecast> inpaint,
                            py::array_t<float, py::array::c_style | py::array::forcecast> init,
                            const std::string& prompt, std::uint64_t seed, double strength) {
    MockGenerator gen(mock_kind(kind));
    GeneratorRequest req;
    req.depth = image_from(depth);
    req.inpaint_mask = mask_from(inpaint);
    req.init_rgb = image_from(init);
    req.prompt = prompt;
    req.seed = seed;
    req.strength = strength;
    req.size = req.depth.height();
    return to_numpy(gen.generate(req).rgb);
  }, py::arg("kind"), py::arg("depth"), py::arg("inpaint"), py::arg("init"), py::arg("prompt") = "",
        py::arg("seed") = 0, py::arg("strength") = 1.0);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    int code = 0;
    {
      py::gil_scoped_release release;
      code = cli::run(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
