/**
 * Seeded PRNG: splitmix64 state expansion feeding xoshiro128**, plus a
 * Box-Muller gaussian. Deterministic for a given seed; independent child
 * streams come from integer spawn keys.
 */

export class Rng {
  private s0: number;
  private s1: number;
  private s2: number;
  private s3: number;
  private spareGauss: number | null = null;

  constructor(readonly seed: number, keys: number[] = []) {
    // splitmix-style mixing of seed and spawn keys into four 32-bit words
    let h = BigInt.asUintN(64, BigInt(Math.floor(seed)));
    for (const k of keys) {
      h = BigInt.asUintN(64, h * 0x9e3779b97f4a7c15n + BigInt(Math.floor(k)) + 0x632be59bd9b4e019n);
    }
    const next = () => {
      h = BigInt.asUintN(64, h + 0x9e3779b97f4a7c15n);
      let z = h;
      z = BigInt.asUintN(64, (z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n);
      z = BigInt.asUintN(64, (z ^ (z >> 27n)) * 0x94d049bb133111ebn);
      z = z ^ (z >> 31n);
      return Number(z & 0xffffffffn) >>> 0;
    };
    this.s0 = next();
    this.s1 = next();
    this.s2 = next();
    this.s3 = next() | 1;
  }

  child(...keys: number[]): Rng {
    return new Rng(this.seed, keys);
  }

  /** uint32 from xoshiro128** */
  nextU32(): number {
    const rotl = (x: number, k: number) => ((x << k) | (x >>> (32 - k))) >>> 0;
    const result = (rotl(Math.imul(this.s1, 5) >>> 0, 7) * 9) >>> 0;
    const t = (this.s1 << 9) >>> 0;
    this.s2 ^= this.s0;
    this.s3 ^= this.s1;
    this.s1 ^= this.s2;
    this.s0 ^= this.s3;
    this.s2 ^= t;
    this.s3 = rotl(this.s3, 11);
    return result;
  }

  /** uniform in [0, 1) with 32-bit resolution */
  random(): number {
    return this.nextU32() / 4294967296;
  }

  uniform(lo: number, hi: number): number {
    return lo + (hi - lo) * this.random();
  }

  int(n: number): number {
    return Math.floor(this.random() * n);
  }

  gauss(): number {
    if (this.spareGauss !== null) {
      const v = this.spareGauss;
      this.spareGauss = null;
      return v;
    }
    let u = 0;
    while (u === 0) u = this.random();
    const r = Math.sqrt(-2 * Math.log(u));
    const theta = 2 * Math.PI * this.random();
    this.spareGauss = r * Math.sin(theta);
    return r * Math.cos(theta);
  }

  /**
   * Complex AWGN with total per-sample variance sigma^2 (sigma^2/2 per
   * component), added in place to interleaved re/im samples.
   */
  addComplexNoise(samples: Float64Array, sigma: number): void {
    const s = sigma / Math.SQRT2;
    for (let i = 0; i < samples.length; i++) {
      samples[i] += s * this.gauss();
    }
  }
}
