/**
 * Per-user BLER versus loss weight lambda from a sweep's bler.csv.
 *
 *   node dist/plot_bler_vs_lambda.js --in bler.csv --out fig_bler_vs_lambda.svg
 *
 * One curve per (decoder, user); user 1 solid, user 2 dashed. The crossing
 * of the two users' curves is the balance point of the weighted loss.
 */

import { writeLineFigure } from './bler.js';
import { parseCliOptions, runCli } from './cli.js';

runCli(() => {
    const options = parseCliOptions(
        process.argv.slice(2),
        'plot_bler_vs_lambda --in bler.csv --out figure.svg',
    );
    return writeLineFigure({ ...options, xKey: 'lambda' });
});
