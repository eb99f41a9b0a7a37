/**
 * Loaders for the two CSV schemas the simulator emits.
 *
 * bler.csv:          snr1_db, snr2_db, lambda, user, bler, ci_low, ci_high,
 *                    trials, decoder, seed
 * constellation.csv: joint_index, s1..sL, dim_0..dim_{n-1}
 *
 * Cells may be empty (written for "not applicable", e.g. lambda on classical
 * decoder rows); those parse to null. Anything else that fails to parse as a
 * number in a numeric column is an error with the row number in the message.
 */

import { readFileSync } from 'node:fs';
import { csvParse, type DSVRowArray } from 'd3-dsv';

export interface BlerRow {
    snr1_db: number;
    snr2_db: number | null;
    lambda: number | null;
    user: number;
    bler: number;
    ci_low: number;
    ci_high: number;
    trials: number;
    decoder: string;
    seed: number | null;
}

export const BLER_COLUMNS = [
    'snr1_db', 'snr2_db', 'lambda', 'user', 'bler',
    'ci_low', 'ci_high', 'trials', 'decoder', 'seed',
];

export interface ConstellationPoint {
    jointIndex: number;
    /** per-user message labels s1..sL, in user order */
    labels: number[];
    /** codeword coordinates dim_0..dim_{n-1} */
    coords: number[];
}

export interface ConstellationTable {
    path: string;
    users: number;
    dims: number;
    points: ConstellationPoint[];
}

function parseCsvFile(path: string): DSVRowArray<string> {
    const text = readFileSync(path, 'utf8');
    const rows = csvParse(text);
    if (rows.columns.length === 0 || rows.columns.every(c => c === '')) {
        throw new Error(`${path}: empty CSV`);
    }
    return rows;
}

function requireColumns(path: string, present: readonly string[], needed: readonly string[]) {
    const missing = needed.filter(c => !present.includes(c));
    if (missing.length > 0) {
        throw new Error(`${path}: missing columns: ${missing.join(', ')}`);
    }
}

function numberCell(path: string, rowIndex: number, column: string, raw: string | undefined): number {
    const value = Number(raw);
    if (raw === undefined || raw === '' || !Number.isFinite(value)) {
        throw new Error(`${path}: row ${rowIndex + 2}: ${column} is not a number (got ${JSON.stringify(raw ?? '')})`);
    }
    return value;
}

function optionalCell(path: string, rowIndex: number, column: string, raw: string | undefined): number | null {
    if (raw === undefined || raw === '') return null;
    return numberCell(path, rowIndex, column, raw);
}

/** Read and validate one bler.csv file. */
export function loadBlerTable(path: string): BlerRow[] {
    const parsed = parseCsvFile(path);
    requireColumns(path, parsed.columns, BLER_COLUMNS);
    if (parsed.length === 0) {
        throw new Error(`${path}: no data rows`);
    }
    return parsed.map((raw, i) => ({
        snr1_db: numberCell(path, i, 'snr1_db', raw.snr1_db),
        snr2_db: optionalCell(path, i, 'snr2_db', raw.snr2_db),
        lambda: optionalCell(path, i, 'lambda', raw.lambda),
        user: numberCell(path, i, 'user', raw.user),
        bler: numberCell(path, i, 'bler', raw.bler),
        ci_low: numberCell(path, i, 'ci_low', raw.ci_low),
        ci_high: numberCell(path, i, 'ci_high', raw.ci_high),
        trials: numberCell(path, i, 'trials', raw.trials),
        decoder: raw.decoder ?? '',
        seed: optionalCell(path, i, 'seed', raw.seed),
    }));
}

/** Read and validate one constellation.csv file; needs dim_0 and dim_1 to plot. */
export function loadConstellationTable(path: string): ConstellationTable {
    const parsed = parseCsvFile(path);
    requireColumns(path, parsed.columns, ['joint_index', 's1']);
    const dimColumns = parsed.columns.filter(c => /^dim_\d+$/.test(c));
    if (dimColumns.length < 2) {
        throw new Error(
            `${path}: scatter plot needs at least 2 signal dimensions, found ${dimColumns.length}`);
    }
    if (parsed.length === 0) {
        throw new Error(`${path}: no data rows`);
    }
    const labelColumns = parsed.columns.filter(c => /^s\d+$/.test(c));
    const points = parsed.map((raw, i) => ({
        jointIndex: numberCell(path, i, 'joint_index', raw.joint_index),
        labels: labelColumns.map(c => numberCell(path, i, c, raw[c])),
        coords: dimColumns.map(c => numberCell(path, i, c, raw[c])),
    }));
    return { path, users: labelColumns.length, dims: dimColumns.length, points };
}
