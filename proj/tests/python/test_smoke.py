import numpy as np
import pytest

import semrad


def test_linear_solution_is_exact():
    mesh = semrad.uniform_cylinder_mesh(spacing=0.6)
    for order in (1, 3, 5):
        d = semrad.discretize(mesh, order)
        assert semrad.manufactured_error(d, "linear") < 1e-11


def test_spectral_convergence_on_curved_mesh():
    mesh = semrad.uniform_cylinder_mesh(spacing=0.5)
    errors = [
        semrad.manufactured_error(semrad.discretize(mesh, p, curve_radius=1.0))
        for p in (2, 4, 6, 8)
    ]
    assert all(b < 0.1 * a for a, b in zip(errors, errors[1:]))


def test_basin_spectrum():
    d = semrad.discretize(semrad.basin_mesh(10.0, 2.0), 4)
    lam = semrad.stability_eigenvalues(d)
    assert np.max(lam.real) <= 1e-8 * np.max(np.abs(lam))
    freq = np.sort(lam.imag[lam.imag > 1e-6])[:5]
    exact = semrad.standing_wave_frequencies(10.0, 2.0, 5)
    assert np.allclose(freq, exact, rtol=1e-3)


def test_synthetic_coefficients():
    imp = semrad.design_pseudo_impulse(0.2, 3.0, 3, 3.0)
    dt = 0.005
    t = np.arange(int(np.ceil(3 * imp.t0 / dt)) + 1) * dt
    x = np.array([imp.displacement(v) for v in t])
    acc = np.array([imp.acceleration(v) for v in t])
    vel = np.array([imp.velocity(v) for v in t])
    c = semrad.added_mass_damping(-(420.0 * acc + 135.0 * vel), x, dt, imp.omega_r)
    band = (c["omega"] > 0.1 * imp.omega_r) & (c["omega"] < 0.9 * imp.omega_r)
    assert np.allclose(c["a"][band], 420.0, rtol=5e-3)
    assert np.allclose(c["b"][band], 135.0, rtol=5e-3)


def test_radiation_run_is_linear_and_decays():
    mesh = semrad.cylinder_mesh(0.5, 3.0, 8.0, beta=3)
    d = semrad.discretize(mesh, 2, curve_radius=0.5)
    imp = semrad.design_pseudo_impulse(d.surface_spacing[1], 3.0, 3, 3.0)
    run = semrad.run_radiation(d, imp, monitors=[0.5])
    f = run["F3"]
    assert np.all(np.isfinite(f))
    assert run["eta"].shape == (len(run["t"]), 1)
    assert np.max(np.abs(run["F1"])) == 0.0
    imp.amplitude = 2.0
    f2 = semrad.run_radiation(d, imp)["F3"]
    assert np.max(np.abs(f2 - 2 * f)) <= 1e-10 * np.max(np.abs(f))
    assert semrad.infinite_frequency_added_mass(d) > 0.0


def test_errors_map_to_python_exceptions():
    with pytest.raises(semrad.GeometryError):
        semrad.cylinder_mesh(2.0, 1.0, 8.0)
    with pytest.raises(semrad.Error):
        semrad.added_mass_damping(np.ones(4), np.ones(5), 0.1, 1.0)
    d = semrad.discretize(semrad.basin_mesh(10.0, 2.0), 4)
    with pytest.raises(semrad.ParameterError):
        semrad.stability_eigenvalues(d, max_dimension=10)


def test_mesh_roundtrip(tmp_path):
    mesh = semrad.box_mesh(0.5, 0.5, 3.0, 6.0, n_bottom=3, n_side=3)
    path = tmp_path / "box.msh"
    semrad.export_mesh(mesh, path)
    back = semrad.import_mesh(path)
    assert back.n_elements == mesh.n_elements
    assert np.allclose(back.vertices, mesh.vertices)
    assert back.count_faces("body") == mesh.count_faces("body")
