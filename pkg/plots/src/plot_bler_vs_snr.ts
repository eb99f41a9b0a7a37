/**
 * BLER versus SNR1 figure from one or more bler.csv files.
 *
 *   node dist/plot_bler_vs_snr.js --in bler.csv --out fig_bler_vs_snr.svg
 *
 * One curve per (decoder, lambda, user); user 1 solid, user 2 dashed.
 */

import { writeLineFigure } from './bler.js';
import { parseCliOptions, runCli } from './cli.js';

runCli(() => {
    const options = parseCliOptions(
        process.argv.slice(2),
        'plot_bler_vs_snr --in bler.csv [--in more.csv] --out figure.svg',
    );
    return writeLineFigure({ ...options, xKey: 'snr1_db' });
});
