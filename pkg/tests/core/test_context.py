import unittest

import numpy as np

from tppflow.core.context import ContextData
from tppflow.contexts.split import SplitContextData
from tppflow.contexts.fit import FitContextData
from tppflow.contexts.metrics import MetricsContextData
from tppflow.contexts.hawkes import HawkesContextData
from tppflow.contexts.community import CommunityContextData
from tppflow.models.hawkes import CommunityAssignment, HawkesParams


class TestContextData(unittest.TestCase):
    """Tests for the ContextData base class."""

    def test_context_name_generation(self):
        """Test context name generation from class name."""
        class TestContextData(ContextData):
            pass

        self.assertEqual(TestContextData._get_context_name(), 'test')

    def test_context_name_generation_with_suffix(self):
        """Test context name generation with ContextData suffix."""
        class CustomTestContextData(ContextData):
            pass

        self.assertEqual(CustomTestContextData._get_context_name(), 'custom_test')

    def test_registered_classes(self):
        """Test that subclasses are findable by context name."""
        self.assertIs(ContextData.get_context_class('split'), SplitContextData)
        self.assertIs(ContextData.get_context_class('community'), CommunityContextData)

    def test_default_to_dict(self):
        """Test the JSON-friendly default view of public attributes."""
        class ArrayContextData(ContextData):
            def __init__(self):
                self.values = np.array([1.0, 2.0])
                self.count = np.int64(3)
                self._hidden = 'x'

        self.assertEqual(ArrayContextData().to_dict(), {'values': [1.0, 2.0], 'count': 3})


class TestContextSummaries(unittest.TestCase):
    """Tests for the summaries exposed by the concrete contexts."""

    def test_hawkes_summary(self):
        """Test the Hawkes context summary."""
        params = HawkesParams([0.1, 0.2], [[0.1, 0.0], [0.0, 0.1]], beta=2.0)
        summary = HawkesContextData(params, 10.0, losses=[3.0, 2.0]).to_dict()
        self.assertEqual(summary['num_users'], 2)
        self.assertEqual(summary['epochs'], 2)
        self.assertAlmostEqual(summary['spectral_radius'], 0.1)

    def test_community_summary(self):
        """Test the community context summary."""
        summary = CommunityContextData(CommunityAssignment([0, 1, 1], 2), 1.0).to_dict()
        self.assertEqual(summary['sizes'], [1, 2])
        self.assertEqual(summary['agreement'], 1.0)


class TestContextProducerRegistration(unittest.TestCase):
    """Test the context producer registration system."""

    def test_producer_registration(self):
        """Test that operations are correctly registered as context producers."""
        self.assertIn('split', SplitContextData.get_producer_operations('split'))
        fit_producers = FitContextData.get_producer_operations('fit')
        for name in ('fit', 'fit_imtpp', 'fine_tune', 'load_model'):
            self.assertIn(name, fit_producers)
        self.assertIn('evaluate', MetricsContextData.get_producer_operations('metrics'))
        self.assertIn('fit_hawkes', HawkesContextData.get_producer_operations('hawkes'))

    def test_get_all_producer_operations(self):
        """Test getting all producer operations."""
        all_producers = ContextData.get_all_producer_operations()
        for name in ('split', 'deletion', 'fit', 'transfer', 'metrics', 'forecast', 'imputation',
                     'hawkes', 'community'):
            self.assertIn(name, all_producers)
        self.assertIn('assign_communities', all_producers['community'])
        self.assertIn('delete_events', all_producers['deletion'])
