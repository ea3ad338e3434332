//! MSB-first bit I/O with Exp-Golomb codes.

use crate::error::{Error, Result};

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    buf: Vec<u8>,
    len: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bits written so far.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn put_bit(&mut self, bit: bool) {
        let byte = (self.len / 8) as usize;
        if byte == self.buf.len() {
            self.buf.push(0);
        }
        if bit {
            self.buf[byte] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    pub fn put_bits(&mut self, value: u32, n: u32) {
        for i in (0..n).rev() {
            self.put_bit((value >> i) & 1 == 1);
        }
    }

    pub fn put_ue(&mut self, v: u32) {
        let code = v as u64 + 1;
        let nbits = 64 - code.leading_zeros();
        for _ in 1..nbits {
            self.put_bit(false);
        }
        for i in (0..nbits).rev() {
            self.put_bit((code >> i) & 1 == 1);
        }
    }

    pub fn put_se(&mut self, v: i32) {
        self.put_ue(se_to_ue(v));
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

pub struct BitReader<'a> {
    buf: &'a [u8],
    pos: u64,
    limit: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(buf: &'a [u8], bit_len: u64) -> Self {
        BitReader {
            buf,
            pos: 0,
            limit: bit_len.min(buf.len() as u64 * 8),
        }
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn get_bit(&mut self) -> Result<bool> {
        if self.pos >= self.limit {
            return Err(Error::Bitstream("read past end".into()));
        }
        let b = self.buf[(self.pos / 8) as usize] & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Ok(b)
    }

    pub fn get_bits(&mut self, n: u32) -> Result<u32> {
        let mut v = 0;
        for _ in 0..n {
            v = (v << 1) | self.get_bit()? as u32;
        }
        Ok(v)
    }

    pub fn get_ue(&mut self) -> Result<u32> {
        let mut zeros = 0;
        while !self.get_bit()? {
            zeros += 1;
            if zeros > 31 {
                return Err(Error::Bitstream("exp-golomb prefix too long".into()));
            }
        }
        let rest = self.get_bits(zeros)? as u64;
        Ok(((1u64 << zeros) + rest - 1) as u32)
    }

    pub fn get_se(&mut self) -> Result<i32> {
        let k = self.get_ue()?;
        Ok(if k % 2 == 1 {
            (k / 2 + 1) as i32
        } else {
            -((k / 2) as i32)
        })
    }
}

fn se_to_ue(v: i32) -> u32 {
    if v > 0 {
        (2 * v - 1) as u32
    } else {
        (-2 * v) as u32
    }
}

/// Length in bits of `ue(v)`.
pub fn ue_len(v: u32) -> u64 {
    let code = v as u64 + 1;
    2 * (63 - code.leading_zeros() as u64) + 1
}

/// Length in bits of `se(v)`.
pub fn se_len(v: i32) -> u64 {
    ue_len(se_to_ue(v))
}
