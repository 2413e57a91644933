use super::{IngestError, OccupancyGrid};

/// Largest accepted cell count; keeps allocation bounded on hostile headers.
pub const MAX_CELLS: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridFormat {
    #[default]
    Pgm,
}

/// Parses a PGM image. Samples are rescaled to 0..=255 before thresholding;
/// a cell is occupied when its rescaled value is `>= occ_threshold`.
pub fn load_grid(bytes: &[u8], format: GridFormat, occ_threshold: u8) -> Result<OccupancyGrid, IngestError> {
    match format {
        GridFormat::Pgm => parse_pgm(bytes, occ_threshold),
    }
}

struct Header {
    binary: bool,
    width: usize,
    height: usize,
    maxval: u32,
}

fn parse_pgm(bytes: &[u8], occ_threshold: u8) -> Result<OccupancyGrid, IngestError> {
    let mut pos = 0usize;
    let magic = bytes.get(0..2).ok_or(IngestError::ShortRead)?;
    let binary = match magic {
        b"P2" => false,
        b"P5" => true,
        _ => return Err(IngestError::Malformed("missing P2/P5 magic".into())),
    };
    pos += 2;
    let width = header_int(bytes, &mut pos)?;
    let height = header_int(bytes, &mut pos)?;
    let maxval = header_int(bytes, &mut pos)?;
    if width == 0 || height == 0 {
        return Err(IngestError::Malformed("zero dimension".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(IngestError::Malformed(format!("maxval {maxval} out of range")));
    }
    let n = width
        .checked_mul(height)
        .filter(|&n| n <= MAX_CELLS)
        .ok_or(IngestError::DimensionOverflow { width, height })?;
    let h = Header {
        binary,
        width,
        height,
        maxval: maxval as u32,
    };
    let cells = if h.binary {
        // exactly one whitespace byte separates the header from the raster
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(IngestError::ShortRead);
        }
        pos += 1;
        read_binary(&bytes[pos..], n, h.maxval)?
    } else {
        read_ascii(bytes, &mut pos, n, h.maxval)?
    };
    OccupancyGrid::new(h.width, h.height, 1.0, cells, occ_threshold)
}

fn skip_ws_and_comments(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() {
        let c = bytes[*pos];
        if c == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else if c.is_ascii_whitespace() {
            *pos += 1;
        } else {
            break;
        }
    }
}

fn header_int(bytes: &[u8], pos: &mut usize) -> Result<usize, IngestError> {
    skip_ws_and_comments(bytes, pos);
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if start == *pos {
        return if *pos >= bytes.len() {
            Err(IngestError::ShortRead)
        } else {
            Err(IngestError::Malformed(format!("expected integer at byte {start}")))
        };
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| IngestError::Malformed("header integer overflow".into()))
}

fn rescale(v: u32, maxval: u32) -> u8 {
    if maxval == 255 {
        v.min(255) as u8
    } else {
        ((v.min(maxval) as u64 * 255 + maxval as u64 / 2) / maxval as u64) as u8
    }
}

fn read_binary(raw: &[u8], n: usize, maxval: u32) -> Result<Vec<u8>, IngestError> {
    if maxval < 256 {
        if raw.len() < n {
            return Err(IngestError::ShortRead);
        }
        Ok(raw[..n].iter().map(|&v| rescale(v as u32, maxval)).collect())
    } else {
        if raw.len() < 2 * n {
            return Err(IngestError::ShortRead);
        }
        Ok(raw[..2 * n]
            .chunks_exact(2)
            .map(|c| rescale(u16::from_be_bytes([c[0], c[1]]) as u32, maxval))
            .collect())
    }
}

fn read_ascii(bytes: &[u8], pos: &mut usize, n: usize, maxval: u32) -> Result<Vec<u8>, IngestError> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let v = header_int(bytes, pos)?;
        if v > maxval as usize {
            return Err(IngestError::Malformed(format!("sample {v} exceeds maxval {maxval}")));
        }
        out.push(rescale(v as u32, maxval));
    }
    Ok(out)
}

/// Binary PGM (P5, maxval 255) encoding of the grid's raw cell bytes.
pub fn write_pgm(grid: &OccupancyGrid) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", grid.width, grid.height).into_bytes();
    out.extend_from_slice(&grid.cells);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_all_free() {
        let src = b"P2\n# comment\n4 4\n255\n0 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n";
        let g = load_grid(src, GridFormat::Pgm, 128).unwrap();
        assert_eq!((g.width, g.height), (4, 4));
        assert_eq!(g.free_count(), 16);
    }

    #[test]
    fn binary_single_occupied() {
        let mut src = b"P5 3 2 255\n".to_vec();
        src.extend_from_slice(&[0, 0, 0, 0, 255, 0]);
        let g = load_grid(&src, GridFormat::Pgm, 128).unwrap();
        assert_eq!(g.free_count(), 5);
        assert!(g.occupied(1, 1));
    }

    #[test]
    fn truncated_payload() {
        let src = b"P5 3 3 255\n\0\0\0\0";
        let err = load_grid(src, GridFormat::Pgm, 128).unwrap_err();
        assert_eq!(err.to_string(), "short read");
        assert!(matches!(load_grid(b"P2 2 2 255 0 0 0", GridFormat::Pgm, 128), Err(IngestError::ShortRead)));
    }

    #[test]
    fn bad_headers() {
        assert!(matches!(load_grid(b"P6 1 1 255\n\0", GridFormat::Pgm, 128), Err(IngestError::Malformed(_))));
        assert!(matches!(
            load_grid(b"P5 4000000000 4000000000 255\n", GridFormat::Pgm, 128),
            Err(IngestError::DimensionOverflow { .. })
        ));
        assert!(matches!(load_grid(b"P2 1 1 0\n0", GridFormat::Pgm, 128), Err(IngestError::Malformed(_))));
    }

    #[test]
    fn sixteen_bit_and_rescaling() {
        let mut src = b"P5 2 1 1000\n".to_vec();
        src.extend_from_slice(&1000u16.to_be_bytes());
        src.extend_from_slice(&10u16.to_be_bytes());
        let g = load_grid(&src, GridFormat::Pgm, 128).unwrap();
        assert!(g.occupied(0, 0));
        assert!(!g.occupied(1, 0));
        let g = load_grid(b"P2 2 1 1\n1 0\n", GridFormat::Pgm, 128).unwrap();
        assert!(g.occupied(0, 0));
    }

    #[test]
    fn roundtrip() {
        let g = OccupancyGrid::from_occupancy(3, 2, &[true, false, false, false, true, true]).unwrap();
        let back = load_grid(&write_pgm(&g), GridFormat::Pgm, 128).unwrap();
        assert_eq!(g.cells, back.cells);
    }
}
