"""Write data/monthly_returns.csv: synthetic monthly factor returns, in percent.

Generating model (all draws independent across months, numpy seed 20240611):

    MKT ~ N(0.65, 4.4^2)
    SMB ~ N(0.20, 3.0^2)
    HML ~ N(0.30, 2.9^2)
    UMD = a(month) - 0.20 MKT - 0.10 SMB - 0.25 HML + N(0, 3.9^2)
          a = -2.0 in January, 1.0 in other months

Dates run from 1990-01-31 to 2019-12-31 (360 months, month-end). Values are
rounded to two decimals, as published factor files are.
"""

import csv
import datetime as dt
import pathlib

import numpy as np

SEED = 20240611
START_YEAR, YEARS = 1990, 30


def month_end(year, month):
    nxt = dt.date(year + month // 12, month % 12 + 1, 1)
    return nxt - dt.timedelta(days=1)


def main():
    rng = np.random.default_rng(SEED)
    n = 12 * YEARS
    dates = [month_end(START_YEAR + i // 12, i % 12 + 1) for i in range(n)]
    mkt = rng.normal(0.65, 4.4, n)
    smb = rng.normal(0.20, 3.0, n)
    hml = rng.normal(0.30, 2.9, n)
    alpha = np.where([d.month == 1 for d in dates], -2.0, 1.0)
    umd = alpha - 0.20 * mkt - 0.10 * smb - 0.25 * hml + rng.normal(0.0, 3.9, n)

    out = pathlib.Path(__file__).with_name("monthly_returns.csv")
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "MKT", "SMB", "HML", "UMD"])
        for row in zip(dates, mkt, smb, hml, umd):
            w.writerow([row[0].isoformat()] + [f"{v:.2f}" for v in row[1:]])


if __name__ == "__main__":
    main()
