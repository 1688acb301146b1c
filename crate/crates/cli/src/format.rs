//! Share file format and byte/symbol packing.
//!
//! ```text
//! "MBCR" | version u8 = 1 | n, k, d, r u16 LE | m u8 | poly u16 LE
//! | generator kind u8 | eval points (vandermonde only: n-1 symbols)
//! | node_id u16 LE | original length u64 LE | stripe count u32 LE
//! | body: per stripe, α symbols (systematic group, then parity t = 1..n-1)
//! ```
//!
//! Symbols (body and eval points) take `ceil(m/8)` bytes each, big-endian.
//! The polynomial field keeps its low 16 bits; bit `m` is implied, so the
//! degree-16 polynomials fit.
//!
//! File bytes become symbols directly when `m = 8`. Otherwise the file is
//! read as an MSB-first bit string cut into `m`-bit symbols, zero-padded.

use mbcr_core::code::{CodeParams, NodeShare};
use mbcr_core::gf::{Field, Symbol};
use mbcr_core::mds::{GeneratorKind, GeneratorSpec};

use crate::error::{CliError, CliResult};

pub const MAGIC: &[u8; 4] = b"MBCR";
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareHeader {
    pub n: u16,
    pub k: u16,
    pub d: u16,
    pub r: u16,
    pub degree: u8,
    /// Full reduction polynomial, including the `x^m` term.
    pub poly: u32,
    pub kind: GeneratorKind,
    pub eval_points: Vec<Symbol>,
    pub node_id: u16,
    pub original_len: u64,
    pub stripes: u32,
}

impl ShareHeader {
    pub fn for_params(params: &CodeParams, node_id: usize, original_len: u64, stripes: u32) -> Self {
        let field = params.field();
        Self {
            n: params.n as u16,
            k: params.k as u16,
            d: params.d as u16,
            r: params.r as u16,
            degree: field.degree() as u8,
            poly: field.poly(),
            kind: params.generator.kind,
            eval_points: params.generator.eval_points.clone(),
            node_id: node_id as u16,
            original_len,
            stripes,
        }
    }

    pub fn code_params(&self) -> CliResult<CodeParams> {
        let field = Field::new(self.degree as u32, self.poly).map_err(corrupt)?;
        let (n, k, d, r) = (self.n as usize, self.k as usize, self.d as usize, self.r as usize);
        let generator = match self.kind {
            GeneratorKind::BuiltinGf2 => {
                let g = GeneratorSpec::builtin_gf2();
                if g.field != field {
                    return Err(CliError::Corruption("builtin generator stored with a non-GF(2) field".into()));
                }
                g
            }
            GeneratorKind::Vandermonde => GeneratorSpec::vandermonde(&field, k, self.eval_points.clone()),
        };
        CodeParams::new(n, k, d, r, generator).map_err(corrupt)
    }

    /// Everything but the node id and body matches.
    pub fn same_encoding(&self, other: &Self) -> bool {
        Self { node_id: 0, ..self.clone() } == Self { node_id: 0, ..other.clone() }
    }

    pub fn symbol_width(&self) -> usize {
        symbol_width(self.degree as u32)
    }

    pub fn alpha(&self) -> usize {
        self.k as usize + self.n as usize - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareFile {
    pub header: ShareHeader,
    /// One share per stripe.
    pub shares: Vec<NodeShare>,
}

pub fn symbol_width(degree: u32) -> usize {
    degree.div_ceil(8) as usize
}

fn corrupt(e: mbcr_core::Error) -> CliError {
    CliError::Corruption(format!("invalid share header: {e}"))
}

fn put_symbol(out: &mut Vec<u8>, s: Symbol, width: usize) {
    out.extend_from_slice(&s.to_be_bytes()[2 - width..]);
}

impl ShareFile {
    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let width = h.symbol_width();
        let mut out = Vec::with_capacity(64 + self.shares.len() * h.alpha() * width);
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        for v in [h.n, h.k, h.d, h.r] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.push(h.degree);
        out.extend_from_slice(&((h.poly & 0xFFFF) as u16).to_le_bytes());
        out.push(h.kind.code());
        if h.kind == GeneratorKind::Vandermonde {
            for &p in &h.eval_points {
                put_symbol(&mut out, p, width);
            }
        }
        out.extend_from_slice(&h.node_id.to_le_bytes());
        out.extend_from_slice(&h.original_len.to_le_bytes());
        out.extend_from_slice(&h.stripes.to_le_bytes());
        for share in &self.shares {
            for s in share.symbols() {
                put_symbol(&mut out, s, width);
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> CliResult<Self> {
        let mut rd = Reader { bytes, pos: 0 };
        if rd.take(4)? != MAGIC {
            return Err(CliError::Corruption("not a share file (bad magic)".into()));
        }
        let version = rd.u8()?;
        if version != VERSION {
            return Err(CliError::Corruption(format!("unsupported share file version {version}")));
        }
        let (n, k, d, r) = (rd.u16()?, rd.u16()?, rd.u16()?, rd.u16()?);
        let degree = rd.u8()?;
        if !(1..=16).contains(&degree) {
            return Err(CliError::Corruption(format!("field degree {degree} outside 1..=16")));
        }
        let low = rd.u16()? as u32;
        let poly = if degree == 16 { low | 1 << 16 } else { low };
        let kind = GeneratorKind::from_code(rd.u8()?).map_err(corrupt)?;
        let width = symbol_width(degree as u32);
        let eval_points = match kind {
            GeneratorKind::Vandermonde => (0..n.saturating_sub(1)).map(|_| rd.symbol(width)).collect::<CliResult<_>>()?,
            GeneratorKind::BuiltinGf2 => Vec::new(),
        };
        let header = ShareHeader {
            n,
            k,
            d,
            r,
            degree,
            poly,
            kind,
            eval_points,
            node_id: rd.u16()?,
            original_len: rd.u64()?,
            stripes: rd.u32()?,
        };
        let params = header.code_params()?;
        if header.node_id == 0 || header.node_id > n {
            return Err(CliError::Corruption(format!("node id {} outside 1..={n}", header.node_id)));
        }
        let alpha = header.alpha();
        let expected = header.stripes as usize * alpha * width;
        if rd.remaining() != expected {
            return Err(CliError::Corruption(format!(
                "body is {} bytes, header implies {expected}",
                rd.remaining()
            )));
        }
        let field = params.field();
        let mut shares = Vec::with_capacity(header.stripes as usize);
        for _ in 0..header.stripes {
            let symbols = (0..alpha).map(|_| rd.symbol(width)).collect::<CliResult<Vec<_>>>()?;
            if let Some(bad) = symbols.iter().find(|&&s| !field.contains(s)) {
                return Err(CliError::Corruption(format!("symbol {bad:#x} outside GF(2^{degree})")));
            }
            shares.push(NodeShare::from_symbols(header.node_id as usize, k as usize, &symbols));
        }
        Ok(Self { header, shares })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> CliResult<&'a [u8]> {
        let end = self.pos + len;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| CliError::Corruption("share file truncated".into()))?;
        self.pos = end;
        Ok(slice)
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn u8(&mut self) -> CliResult<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> CliResult<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> CliResult<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> CliResult<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn symbol(&mut self, width: usize) -> CliResult<Symbol> {
        Ok(self.take(width)?.iter().fold(0, |acc, &b| acc << 8 | b as Symbol))
    }
}

/// Number of `m`-bit symbols needed for `len` bytes.
pub fn symbol_count(len: u64, degree: u32) -> u64 {
    if degree == 8 {
        len
    } else {
        (len * 8).div_ceil(degree as u64)
    }
}

/// Splits `data` into `m`-bit symbols (MSB first); the tail is zero-padded.
pub fn bytes_to_symbols(data: &[u8], degree: u32) -> Vec<Symbol> {
    if degree == 8 {
        return data.iter().map(|&b| b as Symbol).collect();
    }
    let m = degree as usize;
    let count = symbol_count(data.len() as u64, degree) as usize;
    let mut out = Vec::with_capacity(count);
    let mut acc: u32 = 0;
    let mut bits = 0;
    for &byte in data {
        acc = acc << 8 | byte as u32;
        bits += 8;
        while bits >= m {
            bits -= m;
            out.push((acc >> bits) as Symbol & mask(m));
        }
        acc &= (1 << bits) - 1;
    }
    if bits > 0 {
        out.push((acc << (m - bits)) as Symbol & mask(m));
    }
    out
}

/// Inverse of [`bytes_to_symbols`]: the first `len` bytes of the bit string.
pub fn symbols_to_bytes(symbols: &[Symbol], degree: u32, len: usize) -> Vec<u8> {
    if degree == 8 {
        return symbols.iter().take(len).map(|&s| s as u8).collect();
    }
    let m = degree as usize;
    let mut out = Vec::with_capacity(len);
    let mut acc: u32 = 0;
    let mut bits = 0;
    for &s in symbols {
        if out.len() == len {
            break;
        }
        acc = acc << m | s as u32;
        bits += m;
        while bits >= 8 && out.len() < len {
            bits -= 8;
            out.push((acc >> bits) as u8);
        }
        acc &= (1 << bits) - 1;
    }
    out
}

fn mask(m: usize) -> Symbol {
    ((1u32 << m) - 1) as Symbol
}
