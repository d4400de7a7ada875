// JSON in, JSON out: the python side decodes with the json module.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "commlab/comm/builtins.hpp"
#include "commlab/exercise/course.hpp"
#include "commlab/service/json_io.hpp"
#include "commlab/service/service.hpp"

namespace py = pybind11;
using namespace commlab;
using service::json;
using service::to_text;

namespace {

std::string run_script(const std::string& source, const std::string& profile, std::optional<std::uint64_t> seed) {
    auto reg = comm::registry_for_profile(profile);
    if (!reg) throw py::value_error("unknown profile '" + profile + "'");
    script::ExecLimits limits;
    limits.seed = seed;
    std::string out;
    {
        py::gil_scoped_release nogil;
        out = to_text(service::outcome_to_json(script::run_source(source, *reg, limits)));
    }
    return out;
}

std::string run_task(const std::string& task_file, const std::string& source, std::optional<std::uint64_t> seed) {
    const auto m = exercise::load_manifest(task_file);
    auto limits = m.limits;
    if (seed) limits.seed = seed;
    py::gil_scoped_release nogil;
    return to_text(service::outcome_to_json(script::run_source(source, *m.registry, limits)));
}

std::string check_task(const std::string& task_file, const std::string& source, std::optional<std::uint64_t> seed) {
    const auto m = exercise::load_manifest(task_file);
    py::gil_scoped_release nogil;
    return to_text(service::grade_report_to_json(grader::grade(m.grading_task(), source, {.seed = seed})));
}

std::string validate_course(const std::string& dir) {
    const auto course = exercise::load_course(dir);
    json tasks = json::array();
    bool ok = true;
    {
        py::gil_scoped_release nogil;
        for (const auto& lab : course.config.labs)
            for (const auto& id : lab.tasks) {
                auto r = exercise::validate_manifest(*course.find_task(id));
                ok = ok && r.ok();
                tasks.push_back(service::validation_to_json(r));
            }
    }
    return to_text(json{{"valid", ok}, {"tasks", tasks}});
}

// The HTTP API without the socket; every method takes and returns JSON text.
class PyService {
public:
    PyService(const std::string& course_dir, std::optional<std::string> data_dir, std::string admin_token) {
        service::ServiceOptions o;
        if (data_dir) o.data_dir = *data_dir;
        o.admin_token = std::move(admin_token);
        svc_ = std::make_unique<service::Service>(
            std::make_shared<const exercise::Course>(exercise::load_course(course_dir)), o);
    }
    py::tuple get_course(const std::string& student) { return wrap(svc_->get_course(student)); }
    py::tuple get_task(const std::string& lab, const std::string& task, const std::string& student) {
        return wrap(svc_->get_task(lab, task, student));
    }
    py::tuple run(const std::string& body) { return call([&](const json& b) { return svc_->post_run(b); }, body); }
    py::tuple check(const std::string& body) { return call([&](const json& b) { return svc_->post_check(b); }, body); }
    py::tuple quiz(const std::string& id, const std::string& body) {
        return call([&](const json& b) { return svc_->post_quiz(id, b); }, body);
    }
    py::tuple progress(const std::string& student) { return wrap(svc_->get_progress(student)); }
    py::tuple exam(const std::string& body, const std::string& token) {
        return call([&](const json& b) { return svc_->post_exam(b, token); }, body);
    }

private:
    static py::tuple wrap(const service::Response& r) { return py::make_tuple(r.status, to_text(r.body)); }
    template <class F>
    py::tuple call(F&& f, const std::string& body) {
        json b;
        try {
            b = json::parse(body);
        } catch (const json::parse_error&) {
            return wrap(service::error_response(400, "request body is not valid JSON"));
        }
        service::Response r;
        {
            py::gil_scoped_release nogil;
            r = f(b);
        }
        return wrap(r);
    }
    std::unique_ptr<service::Service> svc_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "commlab core: script execution, grading, course validation and the service API";

    py::register_exception<exercise::ManifestError>(m, "ManifestError", PyExc_ValueError);

    m.def("run_script", &run_script, py::arg("source"), py::arg("profile") = "comm", py::arg("seed") = py::none());
    m.def("run_task", &run_task, py::arg("task_file"), py::arg("source"), py::arg("seed") = py::none());
    m.def("check_task", &check_task, py::arg("task_file"), py::arg("source"), py::arg("seed") = py::none());
    m.def("validate_course", &validate_course, py::arg("course_dir"));
    m.def("profiles", &comm::profile_names);

    py::class_<PyService>(m, "Service")
        .def(py::init<const std::string&, std::optional<std::string>, std::string>(), py::arg("course_dir"),
             py::arg("data_dir") = py::none(), py::arg("admin_token") = "")
        .def("get_course", &PyService::get_course, py::arg("student") = "")
        .def("get_task", &PyService::get_task, py::arg("lab"), py::arg("task"), py::arg("student") = "")
        .def("run", &PyService::run)
        .def("check", &PyService::check)
        .def("quiz", &PyService::quiz)
        .def("progress", &PyService::progress)
        .def("exam", &PyService::exam, py::arg("body"), py::arg("token"));
}
