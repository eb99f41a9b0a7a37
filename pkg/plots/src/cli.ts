/**
 * Shared plumbing for the standalone figure scripts: --in / --out flags,
 * optional axis ranges, and uniform error reporting on stderr.
 */

import { parseArgs } from 'node:util';

export interface CliOptions {
    inputs: string[];
    output: string;
    xRange?: [number, number];
    yRange?: [number, number];
    title?: string;
}

export function parseRange(text: string, flag: string): [number, number] {
    const parts = text.split(',').map(Number);
    if (parts.length !== 2 || parts.some(v => !Number.isFinite(v))) {
        throw new Error(`${flag} expects two comma-separated numbers, got ${JSON.stringify(text)}`);
    }
    return [parts[0], parts[1]];
}

export function parseCliOptions(argv: string[], usage: string): CliOptions {
    const { values } = parseArgs({
        args: argv,
        options: {
            in: { type: 'string', multiple: true },
            out: { type: 'string' },
            'x-range': { type: 'string' },
            'y-range': { type: 'string' },
            title: { type: 'string' },
        },
    });
    if (!values.in || values.in.length === 0 || !values.out) {
        throw new Error(`usage: ${usage}`);
    }
    const options: CliOptions = { inputs: values.in, output: values.out };
    if (values['x-range']) options.xRange = parseRange(values['x-range'], '--x-range');
    if (values['y-range']) options.yRange = parseRange(values['y-range'], '--y-range');
    if (values.title) options.title = values.title;
    return options;
}

/** Run a script body; any failure prints one diagnostic line and exits 1. */
export function runCli(body: () => { output: string }): void {
    try {
        const result = body();
        console.log(`wrote ${result.output}`);
    } catch (err) {
        console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
        process.exitCode = 1;
    }
}
