//! Binary PPM (P6) rendering of raster diagrams.

use std::io::{self, Write};

use crate::distances::SitePair;
use crate::geom::Point2;
use crate::raster::{RasterDiagram, UNDEFINED};

/// Deterministic color of a site pair: a splitmix64 hash of `(i, j)` spread
/// into the upper three quarters of each channel so regions stay visible next
/// to the black site markers.
pub fn pair_color(pair: SitePair) -> [u8; 3] {
    let mut z = ((pair.i as u64) << 32 | pair.j as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    let channel = |shift: u32| 64 + (((z >> shift) & 0xff) as u8) % 192;
    [channel(0), channel(8), channel(16)]
}

const UNDEFINED_COLOR: [u8; 3] = [255, 255, 255];
const SITE_COLOR: [u8; 3] = [0, 0, 0];
/// Radius of the site markers, in cells.
const SITE_RADIUS: i64 = 2;

/// RGB pixels, top row first, with sites drawn as black disks.
pub fn render_pixels(raster: &RasterDiagram, sites: &[Point2]) -> Vec<u8> {
    let (w, h) = (raster.width(), raster.height());
    let mut pixels = vec![0u8; w * h * 3];
    for row in 0..h {
        // image rows run top to bottom, raster rows bottom to top
        let y = h - 1 - row;
        for col in 0..w {
            let o = raster.owner[row * w + col];
            let color = if o == UNDEFINED { UNDEFINED_COLOR } else { pair_color(raster.candidates[o as usize]) };
            let at = (y * w + col) * 3;
            pixels[at..at + 3].copy_from_slice(&color);
        }
    }
    for &s in sites {
        let Some((row, col)) = raster.grid.cell_of(s) else {
            continue;
        };
        for dr in -SITE_RADIUS..=SITE_RADIUS {
            for dc in -SITE_RADIUS..=SITE_RADIUS {
                if dr * dr + dc * dc > SITE_RADIUS * SITE_RADIUS {
                    continue;
                }
                let (r, c) = (row as i64 + dr, col as i64 + dc);
                if r < 0 || c < 0 || r >= h as i64 || c >= w as i64 {
                    continue;
                }
                let y = h - 1 - r as usize;
                let at = (y * w + c as usize) * 3;
                pixels[at..at + 3].copy_from_slice(&SITE_COLOR);
            }
        }
    }
    pixels
}

pub fn write_ppm<W: Write>(out: &mut W, raster: &RasterDiagram, sites: &[Point2]) -> io::Result<()> {
    write!(out, "P6\n{} {}\n255\n", raster.width(), raster.height())?;
    out.write_all(&render_pixels(raster, sites))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distances::{DistanceKind, DistanceSpec};
    use crate::raster::{compute_raster, GridSpec, Mode};

    #[test]
    fn colors_are_deterministic_and_distinct() {
        assert_eq!(pair_color(SitePair::new(0, 1)), pair_color(SitePair::new(1, 0)));
        let colors: std::collections::HashSet<[u8; 3]> = SitePair::all(12).into_iter().map(pair_color).collect();
        assert_eq!(colors.len(), 66);
        for c in colors {
            assert!(c.iter().all(|&v| v >= 64));
        }
    }

    #[test]
    fn ppm_layout() {
        let sites = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.2, 1.0)];
        let grid = GridSpec::around_sites(&sites, 20, 10).unwrap();
        let raster = compute_raster(&sites, DistanceSpec::new(DistanceKind::ViewAngle), Mode::Furthest, grid).unwrap();
        let mut buf = Vec::new();
        write_ppm(&mut buf, &raster, &sites).unwrap();
        let header = b"P6\n20 10\n255\n";
        assert_eq!(&buf[..header.len()], header);
        assert_eq!(buf.len(), header.len() + 20 * 10 * 3);
        // site 0 lies in the bottom-left part of the image
        let (row, col) = grid.cell_of(sites[0]).unwrap();
        let at = header.len() + ((9 - row) * 20 + col) * 3;
        assert_eq!(&buf[at..at + 3], &[0, 0, 0]);
    }
}
