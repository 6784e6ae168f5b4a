import pytest

from tppflow.core.errors import MalformedSequenceError, ParseError
from tppflow.core.ingest import infer_format, parse_dataset, read_dataset, serialize_dataset
from tppflow.core.events import Event, Sequence, Dataset
from tppflow.core.synthetic import lognormal_renewal


class TestParseCsv:
    """Tests for CSV ingestion."""

    def test_two_rows(self):
        """Test that two rows of one sequence give one two-event sequence."""
        ds = parse_dataset(b"seq_id,time,mark\na,0.5,x\na,1.5,y\n")
        assert len(ds) == 1
        assert len(ds.sequences[0]) == 2
        assert ds.vocab == ('x', 'y')

    def test_empty_stream(self):
        """Test that an empty payload is an empty dataset."""
        assert len(parse_dataset(b"")) == 0

    def test_rows_sorted_by_time(self):
        """Test that out-of-order rows match the pre-sorted input."""
        unsorted = parse_dataset(b"seq_id,time,mark\na,2.0,x\na,1.0,y\nb,3.0,x\n")
        ordered = parse_dataset(b"seq_id,time,mark\na,1.0,y\na,2.0,x\nb,3.0,x\n")
        assert [list(s.times) for s in unsorted] == [list(s.times) for s in ordered]
        assert [[unsorted.vocab[m] for m in s.marks] for s in unsorted] == \
               [[ordered.vocab[m] for m in s.marks] for s in ordered]

    def test_locations(self):
        """Test that x,y columns become event locations."""
        ds = parse_dataset(b"seq_id,time,mark,x,y\na,1,m,0,0\na,2,m,3,4\n")
        assert ds.has_locations
        assert ds.sequences[0][1].location == (3.0, 4.0)

    def test_bad_time_names_line(self):
        """Test that an unparsable value reports its line number."""
        with pytest.raises(ParseError) as info:
            parse_dataset(b"seq_id,time,mark\na,1.0,x\na,oops,x\n")
        assert info.value.line == 3

    def test_missing_column(self):
        """Test that the header must carry seq_id, time and mark."""
        with pytest.raises(ParseError):
            parse_dataset(b"seq_id,mark\na,x\n")

    def test_duplicate_timestamp(self):
        """Test that ties within a sequence are rejected."""
        with pytest.raises(MalformedSequenceError):
            parse_dataset(b"seq_id,time,mark\na,1.0,x\na,1.0,y\n")


class TestParseJsonl:
    """Tests for JSONL ingestion."""

    def test_records(self):
        """Test objects with optional loc."""
        payload = b'{"seq_id": "a", "time": 1, "mark": "m", "loc": [0, 0]}\n' \
                  b'{"seq_id": "a", "time": 2, "mark": "n", "loc": [1, 1]}\n'
        ds = parse_dataset(payload, 'jsonl')
        assert ds.has_locations
        assert ds.vocab == ('m', 'n')

    def test_invalid_json_line(self):
        """Test that a broken line is reported by number."""
        with pytest.raises(ParseError) as info:
            parse_dataset(b'{"seq_id": "a", "time": 1, "mark": "m"}\n{broken\n', 'jsonl')
        assert info.value.line == 2


class TestRoundTrip:
    """Tests for serialize_dataset."""

    @pytest.mark.parametrize('fmt', ['csv', 'jsonl'])
    def test_reparse_equal(self, spatial_dataset, fmt):
        """Test that serializing then parsing gives an equal dataset."""
        again = parse_dataset(serialize_dataset(spatial_dataset, fmt), fmt)
        assert again.vocab == spatial_dataset.vocab
        assert [s.events for s in again] == [s.events for s in spatial_dataset]

    def test_csv_floats_bit_exact(self):
        """Test that CSV timestamps and locations read back to the same float64 bits."""
        ds = lognormal_renewal(6, 6, num_marks=2, locations=True, seed=0)
        again = parse_dataset(serialize_dataset(ds))
        for before, after in zip(ds, again):
            assert before.times.tobytes() == after.times.tobytes()
            assert before.locations.tobytes() == after.locations.tobytes()

    def test_known_hard_value(self):
        """Test a timestamp whose shortest repr the fast float parser misreads."""
        value = 11.885207305985153
        ds = Dataset([Sequence('a', [Event(0, value)])], ('m',))
        assert parse_dataset(serialize_dataset(ds)).sequences[0][0].time == value

    @pytest.mark.parametrize('fmt', ['csv', 'jsonl'])
    def test_region_survives(self, fmt):
        """Test that sequence regions are written and read back."""
        ds = Dataset([Sequence('a', [Event(0, 1.0)], region='north'),
                      Sequence('b', [Event(0, 2.0)])], ('m',))
        again = parse_dataset(serialize_dataset(ds, fmt), fmt)
        assert [s.region for s in again] == ['north', None]
        assert again == ds

    def test_no_region_column_without_regions(self):
        """Test that region-less datasets keep the plain header."""
        ds = Dataset([Sequence('a', [Event(0, 1.0)])], ('m',))
        assert serialize_dataset(ds).decode().splitlines()[0] == 'seq_id,time,mark'

    def test_imputed_flag_survives(self):
        """Test the extra imputed column."""
        ds = Dataset([Sequence('a', [Event(0, 1.0), Event(0, 1.5, imputed=True), Event(0, 2.0)])], ('m',))
        text = serialize_dataset(ds).decode()
        assert text.splitlines()[0] == 'seq_id,time,mark,imputed'
        assert parse_dataset(text.encode()).sequences[0][1].imputed

    def test_read_from_file(self, renewal_path):
        """Test reading a generated file by extension."""
        ds = read_dataset(str(renewal_path))
        assert len(ds) == 20
        assert ds.num_marks == 3


class TestInferFormat:
    """Tests for infer_format."""

    def test_extensions(self):
        """Test the recognized extensions."""
        assert infer_format('a.csv') == 'csv'
        assert infer_format('a.JSONL') == 'jsonl'
        with pytest.raises(ParseError):
            infer_format('a.txt')
