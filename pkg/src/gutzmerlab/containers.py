"""Binary containers for grid functions and spectral data.

GFN1 (grid function): magic b"GFN1", little-endian throughout.
    uint32 n, nx, nu, nt; float64 lx, lu, lt (half extents); uint8 schwartz;
    complex samples as interleaved float64 pairs, row-major, t fastest.

SPD1 (spectral data): magic b"SPD1".
    uint32 n, nlam, kmax+1, flags, nx, nu; float64 lx, lu, dl,
    A_requested, B_requested (zero when absent);
    float64 lambda[nlam], wmu[nlam]; float64 norms2 stored row-major [k, j];
    flags bit0: projection blocks follow as complex float64
    [nlam, kmax+1, nx, nu]; bit1: modal coefficient blocks follow as
    complex float64 [nlam, kmax+1, acap+1] preceded by uint32 acap+1.
"""

from __future__ import annotations

import struct

import numpy as np

from .grids import fft_grid as _fft_grid
from .hermite_modes import ModalSlice
from .spectral import BandLimit, GridFunction, LambdaGrid, SpectralData


class ContainerError(ValueError):
    pass


def write_gfn(path: str, f: GridFunction) -> None:
    if f.n != 1:
        raise ContainerError("GFN1 serialization supports n = 1")
    with open(path, "wb") as fh:
        fh.write(b"GFN1")
        fh.write(struct.pack("<IIII", f.n, f.xgrid.size, f.ugrid.size, f.tgrid.size))
        fh.write(struct.pack("<ddd", -f.xgrid[0], -f.ugrid[0], f.t_half_window))
        fh.write(struct.pack("<B", 1 if f.schwartz else 0))
        data = np.ascontiguousarray(f.samples, dtype="<c16")
        fh.write(data.tobytes())


def read_gfn(path: str) -> GridFunction:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != b"GFN1":
            raise ContainerError(f"bad magic {magic!r}; not a GFN1 file")
        n, nx, nu, nt = struct.unpack("<IIII", fh.read(16))
        lx, lu, lt = struct.unpack("<ddd", fh.read(24))
        (schwartz,) = struct.unpack("<B", fh.read(1))
        count = nx ** n * nu ** n * nt
        data = np.frombuffer(fh.read(count * 16), dtype="<c16").astype(complex)
    samples = data.reshape((nx,) * n + (nu,) * n + (nt,))
    return GridFunction(n, _fft_grid(nx, lx), _fft_grid(nu, lu), _fft_grid(nt, lt),
                        samples, schwartz=bool(schwartz))


FLAG_PROJECTIONS = 1
FLAG_MODAL = 2


def write_spd(path: str, sd: SpectralData, with_projections: bool = True,
              with_modal: bool = True) -> None:
    if sd.n != 1:
        raise ContainerError("SPD1 serialization supports n = 1")
    flags = (FLAG_PROJECTIONS if with_projections else 0) | (FLAG_MODAL if with_modal else 0)
    nlam = sd.lam.size
    kk = sd.kmax + 1
    nx, nu = sd.xgrid.size, sd.ugrid.size
    req = sd.requested_band
    with open(path, "wb") as fh:
        fh.write(b"SPD1")
        fh.write(struct.pack("<IIIIII", sd.n, nlam, kk, flags, nx, nu))
        fh.write(struct.pack("<ddddd", -sd.xgrid[0], -sd.ugrid[0], sd.lgrid.dl,
                             req.A if req else 0.0, req.B if req else 0.0))
        fh.write(np.ascontiguousarray(sd.lam, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(sd.wmu, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(sd.norms2, dtype="<f8").tobytes())
        if flags & FLAG_PROJECTIONS:
            for j in range(nlam):
                fh.write(np.ascontiguousarray(sd.projections[j], dtype="<c16").tobytes())
        if flags & FLAG_MODAL:
            acap = max(ms.coef.shape[1] for ms in sd.modal)
            fh.write(struct.pack("<I", acap))
            for ms in sd.modal:
                block = np.zeros((kk, acap), dtype="<c16")
                block[:, : ms.coef.shape[1]] = ms.coef
                fh.write(block.tobytes())


def read_spd(path: str) -> SpectralData:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != b"SPD1":
            raise ContainerError(f"bad magic {magic!r}; not an SPD1 file")
        n, nlam, kk, flags, nx, nu = struct.unpack("<IIIIII", fh.read(24))
        lx, lu, dl, areq, breq = struct.unpack("<ddddd", fh.read(40))
        lam = np.frombuffer(fh.read(nlam * 8), dtype="<f8").astype(float)
        wmu = np.frombuffer(fh.read(nlam * 8), dtype="<f8").astype(float)
        norms2 = np.frombuffer(fh.read(kk * nlam * 8), dtype="<f8").reshape(kk, nlam).astype(float)
        xg, ug = _fft_grid(nx, lx), _fft_grid(nu, lu)
        projections = []
        if flags & FLAG_PROJECTIONS:
            for _ in range(nlam):
                raw = np.frombuffer(fh.read(kk * nx * nu * 16), dtype="<c16")
                projections.append(raw.reshape(kk, nx, nu).astype(complex))
        modal = []
        if flags & FLAG_MODAL:
            (acap,) = struct.unpack("<I", fh.read(4))
            for j in range(nlam):
                raw = np.frombuffer(fh.read(kk * acap * 16), dtype="<c16")
                modal.append(ModalSlice(float(lam[j]), raw.reshape(kk, acap).astype(complex)))
    lgrid = LambdaGrid(lam, dl, wmu)
    if not projections:
        projections = [np.zeros((kk, nx, nu), dtype=complex) for _ in range(nlam)]
    slices = [np.sum(pk, axis=0) * abs(lv) / (2 * np.pi)
              for pk, lv in zip(projections, lam)]
    sd = SpectralData(
        n=n, lgrid=lgrid, kmax=kk - 1, xgrid=xg, ugrid=ug, slices=slices,
        projections=projections, norms2=norms2, modal=modal,
        tail=np.zeros(nlam),
        requested_band=BandLimit(areq, breq) if areq > 0 and breq > 0 else None,
    )
    try:
        sd.band = sd.achieved_band()
    except Exception:
        sd.band = None
    return sd
